#include <random>

#include "torusflux/directions.hpp"

#include "test_helpers.hpp"

using namespace torusflux;
using namespace tfx_test;

TEST_CASE("direction set validates at startup") {
    const DirectionSet& ds = direction_set();
    REQUIRE(ds.theta_dirs.size() == 3);
    REQUIRE(ds.v_dirs.size() == 6);
    REQUIRE(ds.eps_v > 0.1);
    REQUIRE(ds.measured_M > 0.0);
    // frames orthonormal to 1e-14 and integer after scaling by N_Lambda
    for (const auto& d : ds.v_dirs) {
        REQUIRE(std::abs(dot(d.k, d.kb)) <= 1e-14);
        REQUIRE(std::abs(norm(cross(d.k, d.kb) - d.kbb)) <= 1e-14);
    }
}

TEST_CASE("identity decomposes with residual at machine precision") {
    const DirectionSet& ds = direction_set();
    const Sym3 id{{1, 1, 1, 0, 0, 0}};
    const auto a = ds.coefficients(id);
    Mat3 recon{};
    for (int k = 0; k < 6; ++k)
        recon = recon + outer(ds.v_dirs[k].kb, ds.v_dirs[k].kb) * (a[k] * a[k]);
    REQUIRE((recon - Mat3::identity()).max_abs() <= 1e-12);
}

TEST_CASE("random matrices in the half ball reconstruct to 1e-10") {
    const DirectionSet& ds = direction_set();
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Sym3 r{{1, 1, 1, 0, 0, 0}};
        Sym3 d;
        for (auto& x : d.s) x = gauss(rng);
        const double fr = d.frobenius();
        for (int i = 0; i < 6; ++i) r.s[i] += d.s[i] / fr * (0.5 * ds.eps_v);
        const auto a = ds.coefficients(r);
        Mat3 recon{};
        for (int k = 0; k < 6; ++k)
            recon = recon + outer(ds.v_dirs[k].kb, ds.v_dirs[k].kb) * (a[k] * a[k]);
        worst = std::max(worst, (recon - r.full()).max_abs());
    }
    REQUIRE(worst <= 1e-10);
}

TEST_CASE("matrices outside the ball are rejected with the margin notice") {
    const DirectionSet& ds = direction_set();
    Sym3 r{{1, 1, 1, 0, 0, 0}};
    r.s[3] = 2.0 * ds.eps_v;
    REQUIRE_THROWS(ds.coefficients(r));
}

TEST_CASE("coefficient bound stays finite and stable across the ball") {
    const DirectionSet& ds = direction_set();
    std::mt19937_64 rng(8);
    std::normal_distribution<double> gauss;
    double sup = 0;
    for (int trial = 0; trial < 200; ++trial) {
        Sym3 r{{1, 1, 1, 0, 0, 0}};
        Sym3 d;
        for (auto& x : d.s) x = gauss(rng);
        const double fr = d.frobenius();
        const double rad = ds.eps_v * double(trial % 10) / 10.0;
        for (int i = 0; i < 6; ++i) r.s[i] += d.s[i] / fr * rad;
        for (double x : ds.coefficients(r, false)) sup = std::max(sup, x);
    }
    REQUIRE(sup <= ds.measured_M + 1e-12);
    REQUIRE(std::isfinite(ds.measured_M));
}

TEST_CASE("Lambda_theta and Lambda_v are disjoint") {
    const DirectionSet& ds = direction_set();
    for (const auto& t : ds.theta_dirs)
        for (const auto& v : ds.v_dirs) REQUIRE(norm(t.k - v.k) > 0.1);
}
