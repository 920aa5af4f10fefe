#include "torusflux/holder.hpp"
#include "torusflux/mollifier.hpp"
#include "torusflux/ops.hpp"
#include "torusflux/random_fields.hpp"

#include "test_helpers.hpp"

using namespace torusflux;
using namespace tfx_test;

namespace {
const TorusGrid g32(32);
}

TEST_CASE("physical-spectral round trip is exact on band-limited fields") {
    ScalarField f = random_scalar(g32, 11, g32.kmax());
    ScalarField back = from_spectrum(g32, to_spectrum(f));
    REQUIRE(max_abs_diff(f, back) <= 1e-13 * sup_norm(f));
}

TEST_CASE("derivative of a single mode and of a constant") {
    ScalarField f = make_field(g32, [](Vec3 x) { return std::sin(two_pi * x.x); });
    ScalarField want = make_field(g32, [](Vec3 x) { return two_pi * std::cos(two_pi * x.x); });
    REQUIRE(max_abs_diff(partial(f, 0), want) <= 1e-12 * two_pi);

    ScalarField c(g32, 3.7);
    for (int axis = 0; axis < 3; ++axis) REQUIRE(sup_norm(partial(c, axis)) <= 1e-12);
}

TEST_CASE("mixed partials commute") {
    ScalarField f = random_scalar(g32, 12, g32.kmax());
    ScalarField a = partial(partial(f, 0), 1);
    ScalarField b = partial(partial(f, 1), 0);
    REQUIRE(max_abs_diff(a, b) <= 1e-13 * std::max(1.0, sup_norm(a)));
}

TEST_CASE("derivative order beyond the maximum is rejected") {
    ScalarField f(g32, 1.0);
    REQUIRE_THROWS(derivative(f, {7, 0, 0}));
}

TEST_CASE("leray annihilates gradients and is idempotent") {
    ScalarField p = make_field(g32, [](Vec3 x) { return std::sin(two_pi * x.x); });
    VectorField grad_p = gradient(p);
    REQUIRE(sup_norm(leray_project(grad_p)) <= 1e-12 * sup_norm(grad_p));

    VectorField u = random_vector(g32, 13, g32.kmax());
    VectorField pu = leray_project(u);
    REQUIRE(sup_norm(divergence(pu)) <= 1e-12 * sup_norm(u));
    REQUIRE(max_abs_diff(leray_project(pu), pu) <= 1e-13 * std::max(1.0, sup_norm(pu)));
}

TEST_CASE("inverse_div_R: defining identity, symmetry by storage, zero trace") {
    VectorField u = random_vector(g32, 14, g32.kmax());
    SymMatrixField r = inverse_div_R(u);
    REQUIRE(r.trace_free);
    REQUIRE(max_trace(r) <= 1e-13 * std::max(1.0, sup_norm(r)));

    VectorField div_r = divergence(r);
    const Vec3 mu = mean(u);
    VectorField centered = u;
    for (int c = 0; c < 3; ++c)
        for (auto& x : centered[c].v) x -= mu[c];
    REQUIRE(max_abs_diff(div_r, centered) <= 1e-12 * std::max(1.0, sup_norm(u)));
}

TEST_CASE("inverse_div_R on a single mean-free mode and on a constant") {
    VectorField u(g32);
    u[1] = make_field(g32, [](Vec3 x) { return std::cos(two_pi * 2 * x.z); });
    SymMatrixField r = inverse_div_R(u);
    REQUIRE(max_abs_diff(divergence(r), u) <= 1e-12);

    VectorField c(g32);
    c[0] = ScalarField(g32, 2.0);
    REQUIRE(sup_norm(inverse_div_R(c)) <= 1e-13);
}

TEST_CASE("inverse_div_Rvex: closed form, constant, divergence identity") {
    ScalarField f = make_field(g32, [](Vec3 x) { return std::cos(two_pi * x.x); });
    VectorField v = inverse_div_Rvex(f);
    VectorField want(g32);
    want[0] = make_field(g32, [](Vec3 x) { return std::sin(two_pi * x.x) / two_pi; });
    REQUIRE(max_abs_diff(v, want) <= 1e-12);

    REQUIRE(sup_norm(inverse_div_Rvex(ScalarField(g32, 5.0))) <= 1e-13);

    ScalarField h = random_scalar(g32, 15, g32.kmax(), 2.0, /*mean_free=*/false);
    ScalarField dv = divergence(inverse_div_Rvex(h));
    ScalarField centered = h;
    const double mu = mean(h);
    for (auto& x : centered.v) x -= mu;
    REQUIRE(max_abs_diff(dv, centered) <= 1e-12 * std::max(1.0, sup_norm(h)));
}

TEST_CASE("mollify_space: unit mass, mean preservation, floor rejection") {
    ScalarField c(g32, 4.2);
    REQUIRE(max_abs_diff(mollify_space(c, 0.1), c) <= 1e-12);

    ScalarField f = random_scalar(g32, 16, g32.kmax(), 2.0, false);
    ScalarField m = mollify_space(f, 0.1);
    REQUIRE(std::abs(mean(m) - mean(f)) <= 1e-12 * std::max(1.0, std::abs(mean(f))));

    REQUIRE_THROWS(mollify_space(f, 0.5 * g32.spacing()));
}

TEST_CASE("mollify_space error is O(ell) with measured constant at most 1") {
    ScalarField f = make_field(g32, [](Vec3 x) { return std::sin(two_pi * x.x); });
    const double c1 = holder_norm(f, 1, 0.0);
    std::vector<double> lx, ly;
    for (double ell : {0.08, 0.12, 0.16, 0.24}) {
        ScalarField m = mollify_space(f, ell);
        const double err = max_abs_diff(m, f);
        REQUIRE(err <= 1.0 * ell * c1);  // measured constant <= 1
        lx.push_back(std::log(ell));
        ly.push_back(std::log(err));
    }
    REQUIRE(fit_slope(lx, ly) >= 0.95);  // at least first order in ell
}

TEST_CASE("mollify_space is linear and commutes with derivative") {
    ScalarField a = random_scalar(g32, 17, g32.kmax());
    ScalarField b = random_scalar(g32, 18, g32.kmax());
    const double ell = 0.11;
    ScalarField lhs = mollify_space(a + b * 2.0, ell);
    ScalarField rhs = mollify_space(a, ell) + mollify_space(b, ell) * 2.0;
    REQUIRE(max_abs_diff(lhs, rhs) <= 1e-12 * std::max(1.0, sup_norm(lhs)));

    ScalarField cd = mollify_space(partial(a, 2), ell);
    ScalarField dc = partial(mollify_space(a, ell), 2);
    REQUIRE(max_abs_diff(cd, dc) <= 1e-12 * std::max(1.0, sup_norm(cd)));
}

TEST_CASE("holder_norm on constants and a single mode") {
    ScalarField c(g32, -2.5);
    REQUIRE(rel_err(holder_norm(c, 0, 0.0), 2.5) <= 1e-13);
    REQUIRE(holder_seminorm_frac(c, 0, 0.5) <= 1e-13);

    ScalarField f = make_field(g32, [](Vec3 x) { return std::sin(two_pi * x.x); });
    REQUIRE(rel_err(holder_seminorm_int(f, 0), 1.0) <= 0.01);
    REQUIRE(rel_err(holder_seminorm_int(f, 1), two_pi) <= 0.01);
}

TEST_CASE("fractional seminorm estimator matches a brute-force pairwise oracle") {
    const TorusGrid g(64);
    const double alpha = 0.5;
    auto profile = [](double t) {
        return std::abs(std::cos(two_pi * t) + 0.25 * std::cos(two_pi * 4 * t));
    };
    ScalarField f = make_field(g, [&](Vec3 x) { return profile(x.x); });

    // Brute force over all pairs of a refined 1-D grid (the field varies in x only).
    const int m = 1024;
    std::vector<double> vals(m);
    for (int i = 0; i < m; ++i) vals[i] = profile(double(i) / m);
    double oracle = 0;
    for (int i = 0; i < m; ++i)
        for (int d = 1; d <= m / 4; ++d) {
            const double dist = double(d) / m;
            const double diff = std::abs(vals[i] - vals[(i + d) % m]);
            oracle = std::max(oracle, diff / std::pow(dist, alpha));
        }

    const double est = holder_seminorm_frac(f, 0, alpha);
    REQUIRE(est <= oracle * (1.0 + 1e-9));  // estimator is a lower bound
    REQUIRE(rel_err(est, oracle) <= 0.05);
}
