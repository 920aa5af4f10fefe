#pragma once

#include <functional>

#include "torusflux/flux_diagnostics.hpp"
#include "torusflux/holder.hpp"
#include "torusflux/ops.hpp"

namespace torusflux {

struct BoussinesqState {
    double t = 0;
    VectorField v;
    ScalarField theta;
    ScalarField p;  // zero mean, recovered spectrally

    BoussinesqState() = default;
    BoussinesqState(double time, VectorField vel, ScalarField th)
        : t(time), v(std::move(vel)), theta(std::move(th)), p(vel.grid) {}
};

struct RelaxedState {
    BoussinesqState base;
    SymMatrixField reynolds;  // trace-free
    VectorField temp_stress;
};

// Pressure from the divergence of the momentum equation:
// lap p = div(theta e3 - (v.grad)v), zero mean.
inline ScalarField pressure_from(const VectorField& v, const ScalarField& theta) {
    VectorField f = advect(v, v);
    f[2] -= theta;
    ScalarField rhs = divergence(f);
    ScalarField p = inverse_laplacian(rhs);
#pragma omp parallel for
    for (std::size_t i = 0; i < p.v.size(); ++i) p.v[i] = -p.v[i];
    return p;
}

// dv/dt = P(theta e3 - (v.grad)v), dtheta/dt = -(v.grad)theta, dealiased.
inline std::pair<VectorField, ScalarField> boussinesq_rhs(const VectorField& v,
                                                          const ScalarField& theta) {
    VectorField adv = advect(v, v);
    VectorField f(v.grid);
    for (int c = 0; c < 3; ++c) {
        f[c] = adv[c] * -1.0;
        if (c == 2) f[c] += theta;
    }
    VectorField dv = leray_project(f);
    ScalarField dth = advect(v, theta) * -1.0;
    return {std::move(dv), std::move(dth)};
}

// Classical 4-stage step with Leray reprojection at the end. The CFL bound
// dt <= 0.5 h / |v|_inf is enforced.
inline BoussinesqState step_rk4(const BoussinesqState& s, double dt) {
    const double vmax = sup_norm(s.v);
    if (vmax > 0)
        require(std::abs(dt) <= 0.5 * s.v.grid.spacing() / vmax,
                "step_rk4: CFL violation (dt too large for |v|_inf)");

    auto [k1v, k1t] = boussinesq_rhs(s.v, s.theta);
    auto [k2v, k2t] = boussinesq_rhs(s.v + k1v * (dt / 2), s.theta + k1t * (dt / 2));
    auto [k3v, k3t] = boussinesq_rhs(s.v + k2v * (dt / 2), s.theta + k2t * (dt / 2));
    auto [k4v, k4t] = boussinesq_rhs(s.v + k3v * dt, s.theta + k3t * dt);

    BoussinesqState out;
    out.t = s.t + dt;
    out.v = s.v + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (dt / 6.0);
    out.theta = s.theta + (k1t + k2t * 2.0 + k3t * 2.0 + k4t) * (dt / 6.0);
    out.v = leray_project(out.v);
    out.p = pressure_from(out.v, out.theta);
    return out;
}

struct SolveOptions {
    double c_desk = 0.2;        // desk lifespan constant, tunable
    double alpha = 0.05;        // Hoelder index for the lifespan estimate
    int sample_every = 1;       // trajectory sampling stride
    bool enforce_lifespan = true;
};

// Integrate over t_span; aborts on the blow-up sentinel (|v|_1 doubling
// within 10 steps).
inline Trajectory solve_local(const BoussinesqState& init, double t_span, double dt,
                              const SolveOptions& opt = {}) {
    if (opt.enforce_lifespan) {
        const double life = opt.c_desk / (holder_norm(init.v, 1, opt.alpha) + 1.0);
        require(std::abs(t_span) <= life,
                "solve_local: requested span exceeds the desk lifespan estimate");
    }
    Trajectory traj;
    BoussinesqState s = init;
    traj.push(s.t, s.v, s.theta);
    const int steps = int(std::round(std::abs(t_span) / std::abs(dt)));
    const double signed_dt = t_span < 0 ? -std::abs(dt) : std::abs(dt);
    // Blow-up sentinel baseline: benign growth from small data must not trip it.
    const double scale0 = holder_norm(init.v, 1, 0.0) + sup_norm(init.theta) + 1e-12;
    double c1_window = scale0;
    for (int k = 1; k <= steps; ++k) {
        s = step_rk4(s, signed_dt);
        if (k % 10 == 0) {
            const double c1 = holder_norm(s.v, 1, 0.0);
            require(c1 <= 2.0 * std::max(c1_window, scale0),
                    "solve_local: blow-up sentinel (|v|_1 doubled within 10 steps)");
            c1_window = std::max(c1, scale0);
        }
        if (k % opt.sample_every == 0 || k == steps) traj.push(s.t, s.v, s.theta);
    }
    return traj;
}

// Shear-flow family: v = (0, 0, A f(x1) t), theta = A f(x1), p = 0. Exact
// global solution for mean-free f.
inline BoussinesqState shear_flow_state(const TorusGrid& g, double A,
                                        const std::function<double(double)>& f, double t) {
    BoussinesqState s;
    s.t = t;
    s.v = VectorField(g);
    s.v[2] = make_field(g, [&](Vec3 x) { return A * f(x.x) * t; });
    s.theta = make_field(g, [&](Vec3 x) { return A * f(x.x); });
    s.p = ScalarField(g);
    return s;
}

// Sup-norm residuals of the relaxed system for given time derivatives:
//   res_v  = dv/dt + div(v (x) v) + grad p - theta e3 - div R
//   res_th = dtheta/dt + v.grad theta - div T
// The momentum sign convention follows the glued system (+div(v (x) v) on
// the left); see the residual tests for the plant-and-recover check.
inline std::pair<double, double> relaxed_residual(const RelaxedState& s, const VectorField& dv_dt,
                                                  const ScalarField& dtheta_dt,
                                                  VectorField* res_v_out = nullptr,
                                                  ScalarField* res_th_out = nullptr) {
    const auto& g = s.base.v.grid;
    VectorField res_v = dv_dt;
    VectorField vv(g);
    for (int j = 0; j < 3; ++j) {
        ScalarField acc(g);
        for (int m = 0; m < 3; ++m) {
            ScalarField prod(g);
#pragma omp parallel for
            for (std::size_t i = 0; i < prod.v.size(); ++i)
                prod.v[i] = s.base.v[j][i] * s.base.v[m][i];
            acc += partial(project_band(prod), m);
        }
        vv[j] = acc;
    }
    res_v += vv;
    res_v += gradient(s.base.p);
    res_v[2] -= s.base.theta;
    res_v -= divergence(s.reynolds);

    ScalarField res_th = dtheta_dt + advect(s.base.v, s.base.theta);
    res_th -= divergence(s.temp_stress);

    if (res_v_out) *res_v_out = res_v;
    if (res_th_out) *res_th_out = res_th;
    return {sup_norm(res_v), sup_norm(res_th)};
}

}  // namespace torusflux
