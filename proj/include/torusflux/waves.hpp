#pragma once

#include "torusflux/perturbation.hpp"

namespace torusflux {

// ---------------------------------------------------------------------------
// Wave assembly. A block family contributes
//   w^(p)_f = c_f g_f eta W_f(U1, U2) M e_f,        W_f = phi(U1) phi(U2),
//   w^(c)_f = (c_f eta / 2 pi lambda) grad g_f x (gradPhi^T S_f),
// with U_c = lambda arg_c . Phi - sigma_c, M = adj(gradPhi) and e_f the wave
// direction. The deformed blocks live far above the grid Nyquist frequency, so
// every oscillatory quantity is evaluated pointwise with exact chain rules;
// only the smooth cofactors are differentiated spectrally. Divergence freedom
// of w^(p) + w^(c) is then an algebraic identity of the evaluation.
// ---------------------------------------------------------------------------

// Grid samples of the perturbation and the derivatives the residual and
// stress machinery need.
struct WaveGrids {
    VectorField w_p, w_c, matd_w, dw_dt;
    ScalarField d, div_w, matd_d, dd_dt;
    std::array<ScalarField, 9> grad_w;  // (r, m) -> d_m w^r
    std::array<ScalarField, 3> grad_d;

    explicit WaveGrids(const TorusGrid& g)
        : w_p(g), w_c(g), matd_w(g), dw_dt(g), d(g), div_w(g), matd_d(g), dd_dt(g) {
        for (auto& f : grad_w) f = ScalarField(g);
        for (auto& f : grad_d) f = ScalarField(g);
    }

    Vec3 w_at(std::size_t i) const { return w_p.at(i) + w_c.at(i); }
};

class WaveAssembly {
  public:
    explicit WaveAssembly(const Perturbation& p) : P(&p) {}

    const Perturbation& pert() const { return *P; }

    static Mat3 adj_derivative(const Mat3& a, const Mat3& da) {
        auto minor_d = [&](int r0, int r1, int c0, int c1) {
            return da(r0, c0) * a(r1, c1) + a(r0, c0) * da(r1, c1) - da(r0, c1) * a(r1, c0)
                   - a(r0, c1) * da(r1, c0);
        };
        Mat3 r;
        r(0, 0) = minor_d(1, 2, 1, 2);
        r(0, 1) = -minor_d(0, 2, 1, 2);
        r(0, 2) = minor_d(0, 1, 1, 2);
        r(1, 0) = -minor_d(1, 2, 0, 2);
        r(1, 1) = minor_d(0, 2, 0, 2);
        r(1, 2) = -minor_d(0, 1, 0, 2);
        r(2, 0) = minor_d(1, 2, 0, 1);
        r(2, 1) = -minor_d(0, 2, 0, 1);
        r(2, 2) = minor_d(0, 1, 0, 1);
        return r;
    }

    Vec3 dt_phi(std::size_t idx) const {
        const Mat3 gp = P->grad_phi(idx);
        const Vec3 vv{P->glue().v[0][idx], P->glue().v[1][idx], P->glue().v[2][idx]};
        return gp * vv * -1.0;
    }

    // Evaluate every family into the accumulator grids. Families are
    // processed one at a time so the transient second-derivative bundles
    // never coexist.
    WaveGrids assemble(bool with_derivs = true, bool with_time = true) const {
        WaveGrids out(P->grid());
        const auto& fams = P->placement().families;
        for (std::size_t f = 0; f < fams.size(); ++f)
            accumulate_family(f, out, with_derivs, with_time);
        return out;
    }

    void accumulate_family(std::size_t f, WaveGrids& out, bool with_derivs,
                           bool with_time) const {
        const Perturbation& Pp = *P;
        const BlockFamily& fam = Pp.placement().families[f];
        const BuildingBlockProfile& prof = Pp.profile();
        const int J = prof.j_trunc;
        const double lambda = Pp.lambda();
        const double eta = Pp.eta(), eta_d = Pp.eta_deriv();
        const double coef = fam.theta_type ? Pp.amp_theta() : Pp.amp_v();
        const double amp_d = Pp.amp_v();
        const Vec3 e = fam.wave_dir;

        // transient second derivatives of the family amplitude
        std::array<ScalarField, 6> hg;
        std::array<ScalarField, 3> gmatd;
        if (with_derivs || with_time) {
            const ScalarField& g0 =
                fam.theta_type ? Pp.tcal(fam.dir_index) : Pp.a_coef(fam.dir_index);
            ScalarField gs = project_band(g0);
            VectorField g1 = gradient(gs);
            VectorField g1_0 = gradient(g1[0]);
            VectorField g1_1 = gradient(g1[1]);
            VectorField g1_2 = gradient(g1[2]);
            hg[0] = g1_0[0];
            hg[1] = 0.5 * (g1_0[1] + g1_1[0]);
            hg[2] = 0.5 * (g1_0[2] + g1_2[0]);
            hg[3] = g1_1[1];
            hg[4] = 0.5 * (g1_1[2] + g1_2[1]);
            hg[5] = g1_2[2];
            ScalarField mg(Pp.grid());
#pragma omp parallel for
            for (std::size_t i = 0; i < mg.v.size(); ++i) mg.v[i] = Pp.amp_matd(fam, i);
            VectorField gm = gradient(project_band(mg));
            for (int c = 0; c < 3; ++c) gmatd[c] = gm[c];
        }
        auto hg_at = [&](std::size_t idx, int l, int m) {
            static const int off[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
            return hg[off[l][m]][idx];
        };

        const std::size_t np = Pp.grid().points();
#pragma omp parallel
        {
            std::vector<cplx> z1p(J), z2p(J);
#pragma omp for
            for (std::size_t idx = 0; idx < np; ++idx) {
                const Mat3 gp = Pp.grad_phi(idx);
                const Mat3 gpt = gp.transposed();
                const Mat3 M = Perturbation::adjugate(gp);
                std::array<Mat3, 3> dgp, dM;
                for (int m = 0; m < 3; ++m) {
                    for (int c = 0; c < 3; ++c)
                        for (int l = 0; l < 3; ++l) dgp[m](c, l) = Pp.hess_at(idx, c, l, m);
                    dM[m] = adj_derivative(gp, dgp[m]);
                }

                const double u1 = Pp.arg_u(fam, 0, idx);
                const double u2 = Pp.arg_u(fam, 1, idx);
                const Vec3 gu1 = Pp.arg_grad(fam, 0, idx);
                const Vec3 gu2 = Pp.arg_grad(fam, 1, idx);
                const double g = Pp.amp_field(fam, idx);
                const Vec3 gg = Pp.amp_grad(fam, idx);

                z1p[0] = std::polar(1.0, two_pi * u1);
                z2p[0] = std::polar(1.0, two_pi * u2);
                for (int l = 1; l < J; ++l) {
                    z1p[l] = z1p[l - 1] * z1p[0];
                    z2p[l] = z2p[l - 1] * z2p[0];
                }
                double w1 = 0, w1d = 0, w2 = 0, w2d = 0;
                for (int l = 1; l <= J; ++l) {
                    const double a = prof.a[l - 1];
                    w1 += 2.0 * a * z1p[l - 1].real();
                    w1d -= 2.0 * a * two_pi * l * z1p[l - 1].imag();
                    w2 += 2.0 * a * z2p[l - 1].real();
                    w2d -= 2.0 * a * two_pi * l * z2p[l - 1].imag();
                }
                const double W = w1 * w2;
                const Vec3 gradW = gu1 * (w1d * w2) + gu2 * (w1 * w2d);
                const Vec3 Me = M * e;

                out.w_p.set(idx, out.w_p.at(idx) + Me * (coef * g * eta * W));
                if (fam.theta_type) out.d.v[idx] += amp_d * eta * W;

                double divMe = 0;
                for (int m = 0; m < 3; ++m)
                    divMe += dM[m](m, 0) * e.x + dM[m](m, 1) * e.y + dM[m](m, 2) * e.z;
                out.div_w.v[idx] +=
                    coef * eta * (dot(gg, Me) * W + g * dot(gradW, Me) + g * W * divMe);

                Mat3 mgp{}, dgp_dt{}, mM{}, dM_dt{};
                Mat3 grad_v{};
                Vec3 dtPhi{};
                if (with_time) {
                    mgp = Pp.matd_grad_phi(idx);
                    dgp_dt = Pp.dgradphi_dt_at(idx);
                    mM = adj_derivative(gp, mgp);
                    dM_dt = adj_derivative(gp, dgp_dt);
                    grad_v = Pp.grad_v_at(idx);
                    dtPhi = dt_phi(idx);
                }

                if (with_derivs) {
                    if (fam.theta_type)
                        for (int m = 0; m < 3; ++m)
                            out.grad_d[m].v[idx] += amp_d * eta * gradW[m];
                    for (int r = 0; r < 3; ++r)
                        for (int m = 0; m < 3; ++m) {
                            const Vec3 dMe{dM[m](0, 0) * e.x + dM[m](0, 1) * e.y
                                               + dM[m](0, 2) * e.z,
                                           dM[m](1, 0) * e.x + dM[m](1, 1) * e.y
                                               + dM[m](1, 2) * e.z,
                                           dM[m](2, 0) * e.x + dM[m](2, 1) * e.y
                                               + dM[m](2, 2) * e.z};
                            out.grad_w[r * 3 + m].v[idx] +=
                                coef * eta
                                * (gg[m] * W * Me[r] + g * gradW[m] * Me[r] + g * W * dMe[r]);
                        }
                }

                if (with_time) {
                    const double mg_v = Pp.amp_matd(fam, idx);
                    const Vec3 mMe = mM * e;
                    Vec3 macc = Me * (coef * W * (mg_v * eta + g * eta_d))
                                + mMe * (coef * g * eta * W);
                    out.matd_w.set(idx, out.matd_w.at(idx) + macc);
                    if (fam.theta_type) out.matd_d.v[idx] += amp_d * eta_d * W;

                    const double du1_dt = lambda * dot(fam.arg1, dtPhi);
                    const double du2_dt = lambda * dot(fam.arg2, dtPhi);
                    const double dW_dt = w1d * w2 * du1_dt + w1 * w2d * du2_dt;
                    const Vec3 vv{Pp.glue().v[0][idx], Pp.glue().v[1][idx],
                                  Pp.glue().v[2][idx]};
                    const double dg_dt = mg_v - dot(vv, gg);
                    Vec3 dtacc = Me * (coef * eta * (dg_dt * W + g * dW_dt))
                                 + Me * (coef * g * eta_d * W)
                                 + (dM_dt * e) * (coef * g * eta * W);
                    out.dw_dt.set(idx, out.dw_dt.at(idx) + dtacc);
                    if (fam.theta_type) out.dd_dt.v[idx] += amp_d * (eta_d * W + eta * dW_dt);
                }

                // corrector harmonics, Hermitian half-lattice l >= 1, m != 0
                const double kappa = coef * eta / (two_pi * lambda);
                const double kappa0 = coef / (two_pi * lambda);
                Vec3 mgg{};
                Vec3 adv_gg{};
                if (with_time) {
                    mgg = Vec3{gmatd[0][idx], gmatd[1][idx], gmatd[2][idx]};
                    for (int r = 0; r < 3; ++r) {
                        double acc = 0;
                        for (int c = 0; c < 3; ++c) acc += grad_v(c, r) * gg[c];
                        mgg[r] -= acc;
                        double adv = 0;
                        const Vec3 vv{Pp.glue().v[0][idx], Pp.glue().v[1][idx],
                                      Pp.glue().v[2][idx]};
                        for (int c = 0; c < 3; ++c)
                            adv += vv[c] * hg_at(idx, std::min(r, c), std::max(r, c));
                        adv_gg[r] = adv;
                    }
                }
                for (int l = 1; l <= J; ++l)
                    for (int m = -J; m <= J; ++m) {
                        if (m == 0) continue;
                        const double b = prof.b(l, m);
                        const Vec3 j = fam.arg1 * double(l) + fam.arg2 * double(m);
                        const Vec3 u = cross(j, e) * (1.0 / dot(j, j));
                        const cplx zz =
                            z1p[l - 1] * (m > 0 ? z2p[m - 1] : std::conj(z2p[-m - 1]));
                        const double cosq = zz.real(), sinq = zz.imag();
                        const Vec3 gpu = gpt * u;
                        const Vec3 Pvec = cross(gg, gpu);
                        out.w_c.set(idx, out.w_c.at(idx) - Pvec * (2.0 * kappa * b * sinq));
                        const Vec3 gth = (gu1 * double(l) + gu2 * double(m)) * two_pi;
                        out.div_w.v[idx] -= 2.0 * kappa * b * cosq * dot(Pvec, gth);
                        if (with_derivs) {
                            for (int mm = 0; mm < 3; ++mm) {
                                const Vec3 dgg{hg_at(idx, 0, mm), hg_at(idx, 1, mm),
                                               hg_at(idx, 2, mm)};
                                const Vec3 dgpu = dgp[mm].transposed() * u;
                                const Vec3 dP = cross(dgg, gpu) + cross(gg, dgpu);
                                for (int r = 0; r < 3; ++r)
                                    out.grad_w[r * 3 + mm].v[idx] +=
                                        -2.0 * kappa * b
                                        * (cosq * gth[mm] * Pvec[r] + sinq * dP[r]);
                            }
                        }
                        if (with_time) {
                            const Vec3 mP = cross(mgg, gpu) + cross(gg, mgp.transposed() * u);
                            out.matd_w.set(idx, out.matd_w.at(idx)
                                                    - Pvec * (2.0 * kappa0 * eta_d * b * sinq)
                                                    - mP * (2.0 * kappa * b * sinq));
                            const Vec3 dtgg = mgg - adv_gg;
                            const Vec3 dtgpu = dgp_dt.transposed() * u;
                            const Vec3 dtP = cross(dtgg, gpu) + cross(gg, dtgpu);
                            const double dq_dt = two_pi * lambda
                                                 * (double(l) * dot(fam.arg1, dtPhi)
                                                    + double(m) * dot(fam.arg2, dtPhi));
                            out.dw_dt.set(idx, out.dw_dt.at(idx)
                                                   - Pvec * (2.0 * kappa0 * eta_d * b * sinq)
                                                   - dtP * (2.0 * kappa * b * sinq)
                                                   - Pvec * (2.0 * kappa * b * cosq * dq_dt));
                        }
                    }
            }
        }
    }

  private:
    const Perturbation* P;
};

}  // namespace torusflux
