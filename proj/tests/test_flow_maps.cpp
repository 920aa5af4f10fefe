#include "torusflux/flow_map.hpp"
#include "torusflux/random_fields.hpp"

#include "test_helpers.hpp"

using namespace torusflux;
using namespace tfx_test;

namespace {
const TorusGrid g32(32);
}

TEST_CASE("constant velocity gives straight characteristics") {
    const Vec3 c{0.21, -0.13, 0.34};
    auto vel = [&](double) {
        VectorField v(g32);
        for (int a = 0; a < 3; ++a) v[a] = ScalarField(g32, c[a]);
        return v;
    };
    const double t = 0.3, t_anchor = 0.1;
    FlowMapSlice map = solve_flow_map(vel, g32, t, t_anchor);
    // Phi(x, t) = x - c (t - t_anchor)
    for (int a = 0; a < 3; ++a) {
        const double want = -c[a] * (t - t_anchor);
        double worst = 0;
        for (double x : map.disp[a].v) worst = std::max(worst, std::abs(x - want));
        REQUIRE(worst <= 1e-10);
    }
    REQUIRE(map.max_det_dev <= 1e-12);
    REQUIRE(map.max_grad_dev <= 1e-12);
}

TEST_CASE("zero velocity fixes the identity map") {
    auto vel = [&](double) { return VectorField(g32); };
    FlowMapSlice map = solve_flow_map(vel, g32, 0.4, 0.2);
    for (int a = 0; a < 3; ++a) REQUIRE(sup_norm(map.disp[a]) == 0.0);
}

TEST_CASE("time-linear shear flow matches the closed form") {
    // v = (0, 0, A cos(2 pi x1) t): characteristics have x1, x2 frozen, so
    // Phi_3(x, t) = x3 - A cos(2 pi x1)(t^2 - t_a^2)/2 exactly.
    const double A = 0.15, t = 0.55, ta = 0.35;
    auto vel = [&](double s) {
        VectorField v(g32);
        v[2] = make_field(g32, [&](Vec3 x) { return A * std::cos(two_pi * x.x) * s; });
        return v;
    };
    FlowMapSlice map = solve_flow_map(vel, g32, t, ta);
    ScalarField want = make_field(
        g32, [&](Vec3 x) { return -A * std::cos(two_pi * x.x) * (t * t - ta * ta) / 2.0; });
    REQUIRE(max_abs_diff(map.disp[2], want) <= 1e-10);
    REQUIRE(sup_norm(map.disp[0]) <= 1e-12);
    REQUIRE(map.max_det_dev <= 1e-8);   // volume preservation
    // |grad Phi - Id| = 2 pi A (t^2-ta^2)/2 here; well under 1/10
    REQUIRE(map.max_grad_dev <= 0.1);
}

TEST_CASE("smooth random velocity: measure preservation and near-identity Jacobian") {
    VectorField v0 = random_divfree(g32, 91, 3, 4.0);
    v0 *= 0.15 / sup_norm(v0);
    auto vel = [&](double) { return v0; };  // frozen field is divergence-free
    FlowMapSlice map = solve_flow_map(vel, g32, 0.30, 0.22);
    REQUIRE(map.max_det_dev <= 1e-6);
    REQUIRE(map.max_grad_dev <= 0.1);
}

TEST_CASE("flow map on the glued toy stage meets the paper bounds") {
    ParamSchedule sched = desk_schedule(8.0, 32.0, 0.25, 0.05);
    BoussinesqState init;
    init.t = 0.40;
    init.v = leray_project(random_vector(g32, 93, 3, 4.0));
    init.v *= 0.1 / holder_norm(init.v, 1, 0.0);
    init.theta = random_scalar(g32, 94, 3, 4.0);
    init.theta *= 0.2 / sup_norm(init.theta);
    init.p = pressure_from(init.v, init.theta);
    auto f1 = std::make_shared<SolvedFlow>(std::move(init), 2e-3);
    auto f2 = std::make_shared<ZeroFlow>(g32);
    StageQ stage(f1, f2, sched);
    GluedStage glued(stage, f1, f2, 2e-3);
    const GluingWindows& win = glued.windows();

    const int i = 0;
    const double t = win.t_i(i) + 0.5 * win.tau;  // middle of supp eta_i
    FlowMapSlice map = solve_flow_map(glued, i, t);
    REQUIRE(map.max_det_dev <= 1e-6);
    REQUIRE(map.max_grad_dev <= 0.1);
}
