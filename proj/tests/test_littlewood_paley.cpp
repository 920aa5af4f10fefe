#include "torusflux/littlewood_paley.hpp"
#include "torusflux/random_fields.hpp"

#include "test_helpers.hpp"

using namespace torusflux;
using namespace tfx_test;

namespace {
const TorusGrid g32(32);
const DyadicSystem lp32(g32);
}

TEST_CASE("partition of unity holds on the resolved lattice") {
    const int km = g32.kmax();
    for (int kx = -km; kx <= km; ++kx)
        for (int ky = -km; ky <= km; ++ky)
            for (int kz = 0; kz <= km; ++kz) {
                const double r = std::sqrt(double(kx) * kx + double(ky) * ky + double(kz) * kz);
                double sum = DyadicSystem::chi(r);
                for (int j = 0; j <= lp32.j_usable + 4; ++j) sum += DyadicSystem::phi(std::ldexp(r, -j));
                REQUIRE(std::abs(sum - 1.0) <= 1e-12);
            }
}

TEST_CASE("cutoff supports and plateaus") {
    REQUIRE(DyadicSystem::chi(0.75) == 1.0);
    REQUIRE(DyadicSystem::chi(4.0 / 3.0) == 0.0);
    REQUIRE(DyadicSystem::phi(0.75) == 0.0);
    REQUIRE(DyadicSystem::phi(8.0 / 3.0) == 0.0);
    REQUIRE(DyadicSystem::phi(6.0 / 7.0) == 1.0);
    REQUIRE(DyadicSystem::phi(1.0) == 1.0);
}

TEST_CASE("delta_j plateau passthrough on a single mode") {
    ScalarField f = make_field(g32, [](Vec3 x) { return std::cos(two_pi * 2 * x.x); });
    REQUIRE(max_abs_diff(delta_j(lp32, f, 1), f) <= 1e-12);
    REQUIRE(sup_norm(delta_j(lp32, f, 0)) <= 1e-12);
    REQUIRE(sup_norm(delta_j(lp32, f, -1)) <= 1e-12);
}

TEST_CASE("delta_j on constants") {
    ScalarField c(g32, 1.5);
    REQUIRE(max_abs_diff(delta_j(lp32, c, -1), c) <= 1e-13);
    for (int j = 0; j <= lp32.j_usable; ++j) REQUIRE(sup_norm(delta_j(lp32, c, j)) <= 1e-13);
}

TEST_CASE("delta_j beyond the lattice returns zero with a truncation flag") {
    ScalarField f = random_scalar(g32, 21, g32.kmax());
    bool truncated = false;
    ScalarField z = delta_j(lp32, f, lp32.j_usable + 1, &truncated);
    REQUIRE(truncated);
    REQUIRE(sup_norm(z) == 0.0);
}

TEST_CASE("blocks sum back to the field") {
    ScalarField f = random_scalar(g32, 22, g32.kmax());
    ScalarField sum = delta_j(lp32, f, -1);
    for (int j = 0; j <= lp32.j_usable; ++j) sum += delta_j(lp32, f, j);
    REQUIRE(max_abs_diff(sum, f) <= 1e-12 * std::max(1.0, sup_norm(f)));
}

TEST_CASE("distant blocks are orthogonal") {
    ScalarField f = random_scalar(g32, 23, g32.kmax());
    for (int j = -1; j + 2 <= lp32.j_usable; ++j) {
        ScalarField a = delta_j(lp32, delta_j(lp32, f, j), j + 2);
        REQUIRE(sup_norm(a) <= 1e-12 * std::max(1.0, sup_norm(f)));
    }
}

TEST_CASE("s_q passthrough, cutoff, and telescoping") {
    const int Q = 2;
    // |k| <= (3/4) 2^Q passes through untouched
    ScalarField lowf = make_field(g32, [](Vec3 x) { return std::sin(two_pi * 3 * x.y); });
    REQUIRE(max_abs_diff(s_q(lowf, Q), lowf) <= 1e-12);
    // |k| >= (4/3) 2^Q is annihilated
    ScalarField hif = make_field(g32, [](Vec3 x) { return std::sin(two_pi * 6 * x.y); });
    REQUIRE(sup_norm(s_q(hif, Q)) <= 1e-12);

    ScalarField f = random_scalar(g32, 24, g32.kmax());
    ScalarField sum = delta_j(lp32, f, -1);
    for (int j = 0; j <= Q - 1; ++j) sum += delta_j(lp32, f, j);
    REQUIRE(max_abs_diff(s_q(f, Q), sum) <= 1e-12 * std::max(1.0, sup_norm(f)));
}

TEST_CASE("besov_norm basics") {
    ScalarField c(g32, -0.8);
    REQUIRE(rel_err(besov_norm(lp32, c, 0.7, 3.0, 2.0), 0.8) <= 1e-12);

    const int j0 = 2;
    ScalarField f = make_field(g32, [](Vec3 x) { return std::cos(two_pi * 4 * x.z); });
    const double inf = std::numeric_limits<double>::infinity();
    REQUIRE(rel_err(besov_norm(lp32, f, 0.5, inf, inf), std::exp2(j0 * 0.5)) <= 1e-12);

    ScalarField r = random_scalar(g32, 25, g32.kmax());
    double prev = besov_norm(lp32, r, -0.5, 2.0, inf);
    for (double s : {0.0, 0.5, 1.0}) {
        const double cur = besov_norm(lp32, r, s, 2.0, inf);
        REQUIRE(cur >= prev * (1.0 - 1e-12));
        prev = cur;
    }
}

TEST_CASE("block norms are bounded by twice the field norm") {
    ScalarField f = random_scalar(g32, 26, g32.kmax());
    for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()})
        REQUIRE(besov_norm(lp32, f, 0.0, p, std::numeric_limits<double>::infinity())
                <= 2.0 * lp_norm(f, p));
}

TEST_CASE("K kernel values and convolution") {
    REQUIRE(k_kernel(0) == 1.0);
    REQUIRE(rel_err(k_kernel(1), std::exp2(-1.0 / 3.0)) <= 1e-15);
    REQUIRE(rel_err(k_kernel(-3), 0.25) <= 1e-15);

    BesovSeq delta;
    delta.j_lo = -1;
    delta.d.assign(10, 0.0);
    const int Q = 4;
    delta.d[Q - delta.j_lo] = 1.0;
    REQUIRE(rel_err(k_kernel_convolve(delta, Q), 1.0) <= 1e-15);

    BesovSeq geo;
    geo.j_lo = -1;
    for (int j = -1; j <= 12; ++j) geo.d.push_back(std::exp2(-j / 6.0));
    for (int q : {0, 3, 6}) {
        // independent direct summation with the piecewise kernel written out
        double want = 0.0;
        for (int j = -1; j <= 12; ++j) {
            const int m = j - q;
            want += (m <= 0 ? std::pow(2.0, 2.0 * m / 3.0) : std::pow(2.0, -m / 3.0))
                    * std::exp2(-j / 6.0);
        }
        REQUIRE(rel_err(k_kernel_convolve(geo, q), want) <= 1e-12);
    }
}

TEST_CASE("K convolution of a decaying sequence decays in Q") {
    BesovSeq d;
    d.j_lo = -1;
    const int jm = 8;
    for (int j = -1; j <= jm; ++j) d.d.push_back(std::exp2(-0.5 * j));
    REQUIRE(k_kernel_convolve(d, jm) <= k_kernel_convolve(d, jm / 2));
}

TEST_CASE("bernstein: single-mode derivative ratio is 2 pi across scales") {
    const TorusGrid g(64);
    for (int lam : {4, 8, 16}) {
        ScalarField f = make_field(g, [lam](Vec3 x) { return std::cos(two_pi * lam * x.x); });
        const double inf = std::numeric_limits<double>::infinity();
        auto rep = bernstein_check(f, lam, /*annulus=*/true, inf, inf);
        REQUIRE(rep.support_ok);
        REQUIRE(rel_err(rep.ratio_upper[1], two_pi) <= 1e-10);
    }
}

TEST_CASE("bernstein: constant field in a ball, order zero") {
    ScalarField c(g32, 2.0);
    auto rep = bernstein_check(c, 4.0, /*annulus=*/false, 2.0, 2.0);
    REQUIRE(rep.support_ok);
    REQUIRE(rel_err(rep.ratio_upper[0], 1.0) <= 1e-12);
}

TEST_CASE("bernstein: support precondition is detected") {
    ScalarField f = make_field(g32, [](Vec3 x) { return std::cos(two_pi * 9 * x.x); });
    auto rep = bernstein_check(f, 4.0, /*annulus=*/false, 2.0, 2.0);
    REQUIRE_FALSE(rep.support_ok);
}

TEST_CASE("bernstein: annulus lower bound with measured constant at most 8") {
    const TorusGrid g(128);
    for (int lam : {8, 16, 32}) {
        // random field filtered onto the annulus [0.75, 1.25] lambda
        ScalarField f = random_scalar(g, 100 + lam, g.kmax());
        Spectrum s = to_spectrum(f);
        for_each_mode(g, [&](std::size_t idx, int kx, int ky, int kz) {
            const double r = std::sqrt(double(kx) * kx + double(ky) * ky + double(kz) * kz);
            if (r < 0.75 * lam || r > 1.25 * lam) s[idx] = 0.0;
        });
        f = from_spectrum(g, s);
        auto rep = bernstein_check(f, lam, /*annulus=*/true, 2.0, 2.0, 0.5, 1.5);
        REQUIRE(rep.support_ok);
        for (int k = 1; k <= 3; ++k) {
            const double c_measured = std::pow(rep.ratio_lower[k], 1.0 / (k + 1));
            REQUIRE(c_measured <= 8.0);
        }
    }
}
