#pragma once

#include <functional>

#include "torusflux/gluing.hpp"

namespace torusflux {

// Inverse flow map Phi_i at one time: displacement Phi - x (periodic) and the
// spectral Jacobian, with the measured deviations from volume preservation.
struct FlowMapSlice {
    int i = 0;
    double t = 0, t_anchor = 0;
    std::array<ScalarField, 3> disp;   // Phi - x
    std::array<ScalarField, 9> grad;   // grad[c*3+m] = d_m Phi^c
    double max_grad_dev = 0;           // sup |grad Phi - Id|
    double max_det_dev = 0;            // sup |det grad Phi - 1|

    Mat3 grad_at(std::size_t idx) const {
        Mat3 m;
        for (int c = 0; c < 3; ++c)
            for (int mm = 0; mm < 3; ++mm) m(c, mm) = grad[c * 3 + mm][idx];
        return m;
    }
};

namespace detail {

// 8-point Lagrange weights for fractional offset xi in [0,1), nodes -3..4.
inline void lagrange8(double xi, double* w) {
    static const int nodes[8] = {-3, -2, -1, 0, 1, 2, 3, 4};
    for (int j = 0; j < 8; ++j) {
        double p = 1;
        for (int m = 0; m < 8; ++m) {
            if (m == j) continue;
            p *= (xi - nodes[m]) / double(nodes[j] - nodes[m]);
        }
        w[j] = p;
    }
}

// Evaluate a grid field at x + dx via separable 8-point Lagrange interpolation.
inline void interp8(const ScalarField& f, const std::array<ScalarField, 3>& dx,
                    ScalarField& out) {
    const int n = f.grid.n;
#pragma omp parallel for collapse(2)
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) {
                const std::size_t idx = f.grid.index(ix, iy, iz);
                double pos[3] = {ix + dx[0][idx] * n, iy + dx[1][idx] * n, iz + dx[2][idx] * n};
                int base[3];
                double w[3][8];
                for (int a = 0; a < 3; ++a) {
                    const double fl = std::floor(pos[a]);
                    base[a] = int(fl);
                    lagrange8(pos[a] - fl, w[a]);
                }
                double acc = 0;
                for (int jx = 0; jx < 8; ++jx) {
                    const int gx = ((base[0] + jx - 3) % n + n) % n;
                    double accy = 0;
                    for (int jy = 0; jy < 8; ++jy) {
                        const int gy = ((base[1] + jy - 3) % n + n) % n;
                        double accz = 0;
                        const double* row = &f.v[(std::size_t(gx) * n + gy) * n];
                        for (int jz = 0; jz < 8; ++jz) {
                            const int gz = ((base[2] + jz - 3) % n + n) % n;
                            accz += w[2][jz] * row[gz];
                        }
                        accy += w[1][jy] * accz;
                    }
                    acc += w[0][jx] * accy;
                }
                out[idx] = acc;
            }
}

}  // namespace detail

// Backward RK4 characteristics for (d_t + v.grad) Phi = 0, Phi(t_anchor) = x:
// integrate dy/ds = v(y, s) from s = t down to t_anchor for every grid point.
inline FlowMapSlice solve_flow_map(const std::function<VectorField(double)>& velocity,
                                   const TorusGrid& g, double t, double t_anchor,
                                   int substeps = 8) {
    FlowMapSlice out;
    out.t = t;
    out.t_anchor = t_anchor;
    for (auto& d : out.disp) d = ScalarField(g);

    const double h = (t_anchor - t) / substeps;
    auto eval = [&](const VectorField& vel, const std::array<ScalarField, 3>& dx,
                    std::array<ScalarField, 3>& k) {
        for (int c = 0; c < 3; ++c) detail::interp8(vel[c], dx, k[c]);
    };

    std::array<ScalarField, 3> k1, k2, k3, k4, tmp;
    for (auto& f : k1) f = ScalarField(g);
    k2 = k3 = k4 = tmp = k1;

    VectorField v_lo = velocity(t);
    for (int m = 0; m < substeps; ++m) {
        const double s = t + m * h;
        VectorField v_mid = velocity(s + 0.5 * h);
        VectorField v_hi = velocity(s + h);

        eval(v_lo, out.disp, k1);
        for (int c = 0; c < 3; ++c)
#pragma omp parallel for
            for (std::size_t i = 0; i < tmp[c].v.size(); ++i)
                tmp[c].v[i] = out.disp[c][i] + 0.5 * h * k1[c][i];
        eval(v_mid, tmp, k2);
        for (int c = 0; c < 3; ++c)
#pragma omp parallel for
            for (std::size_t i = 0; i < tmp[c].v.size(); ++i)
                tmp[c].v[i] = out.disp[c][i] + 0.5 * h * k2[c][i];
        eval(v_mid, tmp, k3);
        for (int c = 0; c < 3; ++c)
#pragma omp parallel for
            for (std::size_t i = 0; i < tmp[c].v.size(); ++i)
                tmp[c].v[i] = out.disp[c][i] + h * k3[c][i];
        eval(v_hi, tmp, k4);
        for (int c = 0; c < 3; ++c)
#pragma omp parallel for
            for (std::size_t i = 0; i < out.disp[c].v.size(); ++i)
                out.disp[c].v[i] +=
                    h / 6.0 * (k1[c][i] + 2 * k2[c][i] + 2 * k3[c][i] + k4[c][i]);
        v_lo = std::move(v_hi);
    }

    // Jacobian by spectral differentiation of the periodic displacement.
    for (int c = 0; c < 3; ++c)
        for (int m = 0; m < 3; ++m) {
            out.grad[c * 3 + m] = partial(out.disp[c], m);
            if (c == m)
                for (auto& x : out.grad[c * 3 + m].v) x += 1.0;
        }

    double gdev = 0, ddev = 0;
#pragma omp parallel for reduction(max : gdev, ddev)
    for (std::size_t i = 0; i < out.disp[0].v.size(); ++i) {
        const Mat3 gm = out.grad_at(i);
        ddev = std::max(ddev, std::abs(gm.det() - 1.0));
        gdev = std::max(gdev, (gm - Mat3::identity()).max_abs());
    }
    out.max_grad_dev = gdev;
    out.max_det_dev = ddev;
    return out;
}

inline FlowMapSlice solve_flow_map(GluedStage& glued, int i, double t, int substeps = 8) {
    FlowMapSlice out = solve_flow_map([&](double s) { return glued.velocity(s); }, glued.grid(),
                                      t, glued.windows().t_i(i), substeps);
    out.i = i;
    return out;
}

}  // namespace torusflux
