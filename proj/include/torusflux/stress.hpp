#pragma once

#include "torusflux/waves.hpp"

namespace torusflux {

struct CancellationReport {
    double mosc_sup = 0, mosc_scale = 0;  // temperature low-frequency identity
    double rosc_sup = 0, rosc_scale = 0;  // Reynolds low-frequency identity
};

struct DivergenceReport {
    double div_sup = 0;
    double w_sup = 0, w_p_sup = 0, w_c_sup = 0, d_sup = 0;
    double scale = 0;  // lambda * |w|_0
};

struct SupportReport {
    double overlap_integral = 0;  // worst pairwise grid integral over earlier families
    double overlap_sup = 0;
    double det_dev = 0, grad_dev = 0;
};

struct StressReport {
    double r_sup = 0, t_sup = 0;           // assembled new stresses (tracked harmonics)
    double r_tail = 0, t_tail = 0;         // bound for the untracked remainder
    double old_r_sup = 0, old_t_sup = 0;   // glued stresses, for the decay ratios
    double consistency_v = 0, consistency_t = 0;
    double consistency_scale_v = 0, consistency_scale_t = 0;
    double w_sup = 0, w_c_sup = 0, d_sup = 0, w1_sup = 0, d1_sup = 0;
    double v_next_sup = 0, th_next_sup = 0, v1_next_sup = 0, th1_next_sup = 0;
};

namespace stressdetail {

inline double sup_entry(const Sym3& s) {
    double m = 0;
    for (double v : s.s) m = std::max(m, std::abs(v));
    return m;
}

// Symmetric trace-free X with div(X e^{i xi.x}) = c e^{i xi.x}, xi real nonzero.
inline void r_symbol(const Vec3& xi, const cplx c[3], cplx x[6]) {
    const double xi2 = dot(xi, xi);
    const cplx p = xi.x * c[0] + xi.y * c[1] + xi.z * c[2];
    const cplx I(0.0, 1.0);
    for (int j = 0; j < 3; ++j)
        for (int m = j; m < 3; ++m) {
            cplx val = -I * (xi[m] * c[j] + xi[j] * c[m]) / xi2
                       + 0.5 * I * xi[j] * xi[m] * p / (xi2 * xi2);
            if (j == m) val += 0.5 * I * p / xi2;
            x[Sym3::idx(j, m)] = val;
        }
}

inline void rvex_symbol(const Vec3& xi, cplx c, cplx y[3]) {
    const double xi2 = dot(xi, xi);
    const cplx I(0.0, 1.0);
    for (int j = 0; j < 3; ++j) y[j] = -I * xi[j] * c / xi2;
}

}  // namespace stressdetail

// Low-frequency cancellation identities, evaluated from independently built
// pieces (tcal from gradPhi and Tbar, a from the geometric solve on R_v, M
// from the adjugate): both defects vanish on the eta plateau.
inline CancellationReport cancellation_checks(const Perturbation& P) {
    CancellationReport rep;
    const auto& sched = P.sched();
    const double dl = sched.delta_q1 * std::pow(sched.ell_q, sched.alpha);
    const double e2 = P.eta() * P.eta();
    const auto& dirs = P.dirs();
    const std::size_t np = P.grid().points();

    double mosc = 0, mosc_scale = 0, rosc = 0, rosc_scale = 0;
#pragma omp parallel for reduction(max : mosc, mosc_scale, rosc, rosc_scale)
    for (std::size_t idx = 0; idx < np; ++idx) {
        const Mat3 M = Perturbation::adjugate(P.grad_phi(idx));
        const Vec3 tbar{P.glue().temp_stress[0][idx], P.glue().temp_stress[1][idx],
                        P.glue().temp_stress[2][idx]};
        Vec3 m_def = tbar;
        for (int k = 0; k < 3; ++k) m_def += (M * dirs.theta_dirs[k].k) * (e2 * P.tcal(k)[idx]);
        mosc = std::max(mosc, norm(m_def));
        mosc_scale = std::max(mosc_scale, norm(tbar));

        Mat3 low{};
        for (int k = 0; k < 3; ++k) {
            const Vec3 me = M * dirs.theta_dirs[k].k;
            low = low + outer(me, me) * (P.tcal(k)[idx] * P.tcal(k)[idx] * e2 / dl);
        }
        for (int k = 0; k < 6; ++k) {
            const Vec3 me = M * dirs.v_dirs[k].kb;
            low = low + outer(me, me) * (P.a_coef(k)[idx] * P.a_coef(k)[idx] * e2 * dl);
        }
        Mat3 r_def = low + P.glue().reynolds.at(idx).full();
        for (int c = 0; c < 3; ++c) r_def(c, c) -= dl * e2;
        rosc = std::max(rosc, r_def.max_abs());
        rosc_scale =
            std::max(rosc_scale, std::max(dl * e2, stressdetail::sup_entry(
                                                       P.glue().reynolds.at(idx))));
    }
    rep.mosc_sup = mosc;
    rep.mosc_scale = std::max(mosc_scale, 1e-300);
    rep.rosc_sup = rosc;
    rep.rosc_scale = std::max(rosc_scale, 1e-300);
    return rep;
}

inline DivergenceReport divergence_check(const Perturbation& P, const WaveGrids& g) {
    DivergenceReport rep;
    const std::size_t np = P.grid().points();
    double dsup = 0, wsup = 0, wpsup = 0, wcsup = 0, dfsup = 0;
#pragma omp parallel for reduction(max : dsup, wsup, wpsup, wcsup, dfsup)
    for (std::size_t idx = 0; idx < np; ++idx) {
        dsup = std::max(dsup, std::abs(g.div_w[idx]));
        wsup = std::max(wsup, norm(g.w_at(idx)));
        wpsup = std::max(wpsup, norm(g.w_p.at(idx)));
        wcsup = std::max(wcsup, norm(g.w_c.at(idx)));
        dfsup = std::max(dfsup, std::abs(g.d[idx]));
    }
    rep.div_sup = dsup;
    rep.w_sup = wsup;
    rep.w_p_sup = wpsup;
    rep.w_c_sup = wcsup;
    rep.d_sup = dfsup;
    rep.scale = P.lambda() * std::max(wsup, 1e-300);
    return rep;
}

// Mother-profile blocks composed with the flow map keep disjoint supports
// (a homeomorphism preserves them); the grid overlap is exactly zero.
inline SupportReport support_check(const Perturbation& P) {
    SupportReport rep;
    rep.det_dev = P.map().max_det_dev;
    rep.grad_dev = P.map().max_grad_dev;
    const auto& fams = P.placement().families;
    const auto& prof = P.profile();
    const std::size_t np = P.grid().points();

    std::vector<double> prev_max(np, 0.0);
    double worst_int = 0, worst_sup = 0;
    for (std::size_t f = 0; f < fams.size(); ++f) {
        double pair_int = 0, pair_sup = 0;
#pragma omp parallel for reduction(+ : pair_int) reduction(max : pair_sup)
        for (std::size_t idx = 0; idx < np; ++idx) {
            const double u1 = P.arg_u(fams[f], 0, idx);
            const double u2 = P.arg_u(fams[f], 1, idx);
            const double b =
                std::abs(prof.mother(u1 - std::floor(u1)) * prof.mother(u2 - std::floor(u2)));
            pair_int += b * prev_max[idx];
            pair_sup = std::max(pair_sup, b * prev_max[idx]);
        }
        worst_int = std::max(worst_int, pair_int / double(np));
        worst_sup = std::max(worst_sup, pair_sup);
#pragma omp parallel for
        for (std::size_t idx = 0; idx < np; ++idx) {
            const double u1 = P.arg_u(fams[f], 0, idx);
            const double u2 = P.arg_u(fams[f], 1, idx);
            prev_max[idx] = std::max(
                prev_max[idx],
                std::abs(prof.mother(u1 - std::floor(u1)) * prof.mother(u2 - std::floor(u2))));
        }
    }
    rep.overlap_integral = worst_int;
    rep.overlap_sup = worst_sup;
    return rep;
}

// New-stress assembly through the oscillatory parametrix at harmonics
// |l|, |m| <= l_report, plus the independent residual-vs-stress comparison.
// The untracked remainder is bounded by the measured argument defect times
// the symbol bound 3/(2 pi lambda |j|_min (1 - |gradPhi - Id|)).
inline StressReport assemble_stress(const Perturbation& P, const WaveGrids& g,
                                    int l_report = 1) {
    StressReport rep;
    const TorusGrid& grid = P.grid();
    const std::size_t np = grid.points();
    const auto& fams = P.placement().families;
    const auto& prof = P.profile();
    const double lambda = P.lambda();
    const double eta = P.eta(), eta_d = P.eta_deriv();
    const double amp_d = P.amp_v();
    const int J = prof.j_trunc;
    const int L = std::min(l_report, J);

    rep.old_r_sup = sup_norm(P.glue().reynolds);
    rep.old_t_sup = sup_norm(P.glue().temp_stress);

    // spectral globals of the glued slice
    VectorField div_rbar = divergence(P.glue().reynolds);
    ScalarField div_tbar = divergence(P.glue().temp_stress);
    VectorField grad_p = gradient(P.glue().p);
    VectorField grad_th = gradient(P.glue().theta);
    ScalarField div_vbar = divergence(P.glue().v);

    // ---- independent residual vs stress argument (pointwise) --------------
    VectorField full_arg_v(grid);
    ScalarField full_arg_t(grid);
    {
        double cons_v = 0, cons_t = 0, scale_v = 0, scale_t = 0, w1 = 0, d1 = 0;
#pragma omp parallel for reduction(max : cons_v, cons_t, scale_v, scale_t, w1, d1)
        for (std::size_t idx = 0; idx < np; ++idx) {
            const Vec3 vbar{P.glue().v[0][idx], P.glue().v[1][idx], P.glue().v[2][idx]};
            const Vec3 w = g.w_at(idx);
            const Vec3 V = vbar + w;
            const Mat3 gv = P.grad_v_at(idx);
            Mat3 gw;
            for (int r = 0; r < 3; ++r)
                for (int m = 0; m < 3; ++m) gw(r, m) = g.grad_w[r * 3 + m][idx];
            w1 = std::max(w1, gw.max_abs());
            const Vec3 gd{g.grad_d[0][idx], g.grad_d[1][idx], g.grad_d[2][idx]};
            d1 = std::max(d1, std::max(std::abs(gd.x), std::max(std::abs(gd.y), std::abs(gd.z))));

            // advection (V . grad)(vbar + w) row-wise
            Vec3 adv{};
            for (int r = 0; r < 3; ++r) {
                double acc = 0;
                for (int m = 0; m < 3; ++m) acc += V[m] * (gv(r, m) + gw(r, m));
                adv[r] = acc;
            }
            const double divs = div_vbar[idx] + g.div_w[idx];
            const Vec3 dw_dt = g.dw_dt.at(idx);
            const Vec3 dv_dt{P.glue().dv_dt[0][idx], P.glue().dv_dt[1][idx],
                             P.glue().dv_dt[2][idx]};
            Vec3 lhs = dv_dt + dw_dt + adv + V * divs;
            lhs.x += grad_p[0][idx];
            lhs.y += grad_p[1][idx];
            lhs.z += grad_p[2][idx];
            lhs.z -= P.glue().theta[idx] + g.d[idx];

            // stress argument: div Rbar + matd w + w.grad vbar - d e3 + div(w (x) w)
            Vec3 wgradv{};
            for (int r = 0; r < 3; ++r) {
                double acc = 0;
                for (int m = 0; m < 3; ++m) acc += w[m] * gv(r, m);
                wgradv[r] = acc;
            }
            Vec3 wgradw{};
            for (int r = 0; r < 3; ++r) {
                double acc = 0;
                for (int m = 0; m < 3; ++m) acc += w[m] * gw(r, m);
                wgradw[r] = acc;
            }
            Vec3 rhs = g.matd_w.at(idx) + wgradv + wgradw + w * g.div_w[idx];
            rhs.x += div_rbar[0][idx];
            rhs.y += div_rbar[1][idx];
            rhs.z += div_rbar[2][idx];
            rhs.z -= g.d[idx];
            full_arg_v.set(idx, rhs);
            cons_v = std::max(cons_v, norm(lhs - rhs));
            scale_v = std::max(scale_v, norm(rhs));

            // temperature side
            const Vec3 gth{grad_th[0][idx], grad_th[1][idx], grad_th[2][idx]};
            const double lhs_t = P.glue().dtheta_dt[idx] + g.dd_dt[idx] + dot(V, gth + gd);
            const double rhs_t = div_tbar[idx] + g.matd_d[idx] + dot(w, gth) + dot(w, gd)
                                 + g.d[idx] * g.div_w[idx];
            full_arg_t[idx] = rhs_t;
            cons_t = std::max(cons_t, std::abs(lhs_t - rhs_t));
            scale_t = std::max(scale_t, std::abs(rhs_t));
        }
        rep.consistency_v = cons_v;
        rep.consistency_t = cons_t;
        rep.consistency_scale_v = std::max(scale_v, 1e-300);
        rep.consistency_scale_t = std::max(scale_t, 1e-300);
        rep.w1_sup = w1;
        rep.d1_sup = d1;
    }

    // ---- tracked parametrix waves ------------------------------------------
    SymMatrixField r_acc(grid);
    VectorField t_acc(grid);
    VectorField tracked_v(grid);
    ScalarField tracked_t(grid);

    // per-family base amplitude fields (kept: 9 families x small)
    std::vector<std::array<ScalarField, 3>> cbase(fams.size());
    std::vector<ScalarField> div_cbase(fams.size(), ScalarField(grid));
    std::vector<std::array<ScalarField, 3>> matd_cbase(fams.size());
    for (std::size_t f = 0; f < fams.size(); ++f) {
        const BlockFamily& fam = fams[f];
        const double coef = fam.theta_type ? P.amp_theta() : P.amp_v();
        for (auto& s : cbase[f]) s = ScalarField(grid);
        for (auto& s : matd_cbase[f]) s = ScalarField(grid);
#pragma omp parallel for
        for (std::size_t idx = 0; idx < np; ++idx) {
            const Mat3 gp = P.grad_phi(idx);
            const Mat3 M = Perturbation::adjugate(gp);
            const Mat3 mM = WaveAssembly::adj_derivative(gp, P.matd_grad_phi(idx));
            const Vec3 Me = M * fam.wave_dir;
            const Vec3 mMe = mM * fam.wave_dir;
            const double gval = P.amp_field(fam, idx);
            const Vec3 c = Me * (coef * gval * eta);
            for (int r = 0; r < 3; ++r) cbase[f][r].v[idx] = c[r];
            const Vec3 mc = Me * (coef * (P.amp_matd(fam, idx) * eta + gval * eta_d))
                            + mMe * (coef * gval * eta);
            for (int r = 0; r < 3; ++r) matd_cbase[f][r].v[idx] = mc[r];
        }
        // spectral divergence of the base amplitude (for the pair waves)
        VectorField tmp(grid);
        for (int r = 0; r < 3; ++r) tmp[r] = project_band(cbase[f][r]);
        div_cbase[f] = divergence(tmp);
    }

    // singles: transport + Nash (+ the d-wave terms on both equations)
    for (std::size_t f = 0; f < fams.size(); ++f) {
        const BlockFamily& fam = fams[f];
#pragma omp parallel for
        for (std::size_t idx = 0; idx < np; ++idx) {
            const double u1 = P.arg_u(fam, 0, idx);
            const double u2 = P.arg_u(fam, 1, idx);
            const Vec3 gu1 = P.arg_grad(fam, 0, idx);
            const Vec3 gu2 = P.arg_grad(fam, 1, idx);
            const Mat3 gv = P.grad_v_at(idx);
            const Vec3 gth{grad_th[0][idx], grad_th[1][idx], grad_th[2][idx]};
            const Vec3 cb{cbase[f][0][idx], cbase[f][1][idx], cbase[f][2][idx]};
            const Vec3 mcb{matd_cbase[f][0][idx], matd_cbase[f][1][idx], matd_cbase[f][2][idx]};
            Vec3 nash{};
            for (int r = 0; r < 3; ++r) {
                double acc = 0;
                for (int m = 0; m < 3; ++m) acc += cb[m] * gv(r, m);
                nash[r] = acc;
            }
            const double nash_t = dot(cb, gth);

            Sym3 racc = r_acc.at(idx);
            Vec3 tacc{t_acc[0][idx], t_acc[1][idx], t_acc[2][idx]};
            Vec3 trv = tracked_v.at(idx);
            double trt = tracked_t[idx];

            for (int l = 1; l <= L; ++l)
                for (int m = -L; m <= L; ++m) {
                    if (m == 0) continue;
                    const double b = prof.b(l, m);
                    const double theta = two_pi * (l * u1 + m * u2);
                    const Vec3 xi = (gu1 * double(l) + gu2 * double(m)) * two_pi;
                    cplx amp[3];
                    for (int r = 0; r < 3; ++r) amp[r] = b * (mcb[r] + nash[r]);
                    if (fam.theta_type) amp[2] -= b * amp_d * eta;  // - d e3
                    cplx x6[6];
                    stressdetail::r_symbol(xi, amp, x6);
                    const cplx ph = std::polar(1.0, theta);
                    for (int c6 = 0; c6 < 6; ++c6) racc.s[c6] += 2.0 * (x6[c6] * ph).real();
                    for (int r = 0; r < 3; ++r) trv[r] += 2.0 * (amp[r] * ph).real();

                    cplx ampt = b * (nash_t + (fam.theta_type ? amp_d * eta_d : 0.0));
                    cplx y3[3];
                    stressdetail::rvex_symbol(xi, ampt, y3);
                    for (int r = 0; r < 3; ++r) tacc[r] += 2.0 * (y3[r] * ph).real();
                    trt += 2.0 * (ampt * ph).real();
                }
            r_acc.set(idx, racc);
            for (int r = 0; r < 3; ++r) t_acc[r].v[idx] = tacc[r];
            tracked_v.set(idx, trv);
            tracked_t[idx] = trt;
        }
    }

    // pairs: oscillation terms of div(w (x) w) and div(w d)
    for (std::size_t f = 0; f < fams.size(); ++f) {
        for (std::size_t f2 = f; f2 < fams.size(); ++f2) {
            const BlockFamily& fa = fams[f];
            const BlockFamily& fb = fams[f2];
            // symmetric tensor S = C_f (x) C_f2 (+ transpose for f != f2)
            SymMatrixField S(grid);
            VectorField vpair(grid);  // w_f d_f2 vector (when f2 is a theta family)
            const bool d_pair = fb.theta_type;
#pragma omp parallel for
            for (std::size_t idx = 0; idx < np; ++idx) {
                const Vec3 ca{cbase[f][0][idx], cbase[f][1][idx], cbase[f][2][idx]};
                const Vec3 cb2{cbase[f2][0][idx], cbase[f2][1][idx], cbase[f2][2][idx]};
                Mat3 t = outer(ca, cb2);
                if (f2 != f) t = t + outer(cb2, ca);
                S.set(idx, Sym3::from_full_symmetric(t));
                if (d_pair) vpair.set(idx, ca * (amp_d * eta));
            }
            VectorField divS = divergence(S);
            ScalarField div_vpair(grid);
            if (d_pair) div_vpair = divergence(vpair);

            // also the reversed d-pair (w_f2 d_f) when f is a theta family
            VectorField vpair_r(grid);
            ScalarField div_vpair_r(grid);
            const bool d_pair_r = fa.theta_type && f2 != f;
            if (d_pair_r) {
#pragma omp parallel for
                for (std::size_t idx = 0; idx < np; ++idx) {
                    const Vec3 cb2{cbase[f2][0][idx], cbase[f2][1][idx], cbase[f2][2][idx]};
                    vpair_r.set(idx, cb2 * (amp_d * eta));
                }
                div_vpair_r = divergence(vpair_r);
            }

#pragma omp parallel for
            for (std::size_t idx = 0; idx < np; ++idx) {
                const double u1a = P.arg_u(fa, 0, idx), u2a = P.arg_u(fa, 1, idx);
                const double u1b = P.arg_u(fb, 0, idx), u2b = P.arg_u(fb, 1, idx);
                const Vec3 g1a = P.arg_grad(fa, 0, idx), g2a = P.arg_grad(fa, 1, idx);
                const Vec3 g1b = P.arg_grad(fb, 0, idx), g2b = P.arg_grad(fb, 1, idx);
                const Sym3 Sv = S.at(idx);
                const Vec3 dS{divS[0][idx], divS[1][idx], divS[2][idx]};

                Sym3 racc = r_acc.at(idx);
                Vec3 tacc{t_acc[0][idx], t_acc[1][idx], t_acc[2][idx]};
                Vec3 trv = tracked_v.at(idx);
                double trt = tracked_t[idx];

                for (int l = 1; l <= L; ++l)
                    for (int m = -L; m <= L; ++m) {
                        if (m == 0) continue;
                        for (int l2 = 1; l2 <= L; ++l2)
                            for (int m2 = -L; m2 <= L; ++m2) {
                                if (m2 == 0) continue;
                                const double bb = 2.0 * prof.b(l, m) * prof.b(l2, m2);
                                for (int sgn = -1; sgn <= 1; sgn += 2) {
                                    // lattice frequency of the combo; skip the
                                    // cancelled zero-sum collection
                                    const Vec3 jfreq =
                                        fa.arg1 * double(l) + fa.arg2 * double(m)
                                        + (fb.arg1 * double(l2) + fb.arg2 * double(m2))
                                              * double(sgn);
                                    if (std::abs(jfreq.x) < 0.5 && std::abs(jfreq.y) < 0.5
                                        && std::abs(jfreq.z) < 0.5)
                                        continue;
                                    const double theta =
                                        two_pi
                                        * (l * u1a + m * u2a + sgn * (l2 * u1b + m2 * u2b));
                                    const Vec3 xi =
                                        (g1a * double(l) + g2a * double(m)
                                         + (g1b * double(l2) + g2b * double(m2)) * double(sgn))
                                        * two_pi;
                                    const cplx ph = std::polar(1.0, theta);
                                    const cplx I(0.0, 1.0);
                                    cplx amp[3];
                                    for (int r = 0; r < 3; ++r) {
                                        const Vec3 row{Sv(r, 0), Sv(r, 1), Sv(r, 2)};
                                        amp[r] = bb * (dS[r] + I * dot(row, xi));
                                    }
                                    cplx x6[6];
                                    stressdetail::r_symbol(xi, amp, x6);
                                    for (int c6 = 0; c6 < 6; ++c6)
                                        racc.s[c6] += (x6[c6] * ph).real();
                                    for (int r = 0; r < 3; ++r)
                                        trv[r] += (amp[r] * ph).real();

                                    if (d_pair) {
                                        const Vec3 vp = vpair.at(idx);
                                        const cplx ampt =
                                            bb * (div_vpair[idx] + I * dot(vp, xi));
                                        cplx y3[3];
                                        stressdetail::rvex_symbol(xi, ampt, y3);
                                        for (int r = 0; r < 3; ++r)
                                            tacc[r] += (y3[r] * ph).real();
                                        trt += (ampt * ph).real();
                                    }
                                    if (d_pair_r) {
                                        const Vec3 vp = vpair_r.at(idx);
                                        const cplx ampt =
                                            bb * (div_vpair_r[idx] + I * dot(vp, xi));
                                        cplx y3[3];
                                        stressdetail::rvex_symbol(xi, ampt, y3);
                                        for (int r = 0; r < 3; ++r)
                                            tacc[r] += (y3[r] * ph).real();
                                        trt += (ampt * ph).real();
                                    }
                                }
                            }
                    }
                r_acc.set(idx, racc);
                for (int r = 0; r < 3; ++r) t_acc[r].v[idx] = tacc[r];
                tracked_v.set(idx, trv);
                tracked_t[idx] = trt;
            }
        }
    }

    // tails: untracked argument mass through the symbol bound
    {
        double tail_v = 0, tail_t = 0;
#pragma omp parallel for reduction(max : tail_v, tail_t)
        for (std::size_t idx = 0; idx < np; ++idx) {
            tail_v = std::max(tail_v, norm(full_arg_v.at(idx) - tracked_v.at(idx)
                                           - Vec3{div_rbar[0][idx], div_rbar[1][idx],
                                                  div_rbar[2][idx]}));
            tail_t = std::max(tail_t,
                              std::abs(full_arg_t[idx] - tracked_t[idx] - div_tbar[idx]));
        }
        // remainder frequencies are nonzero integer vectors times lambda
        const double denom = two_pi * lambda * (1.0 - P.map().max_grad_dev);
        rep.r_tail = 3.0 * tail_v / denom;
        rep.t_tail = tail_t / denom;
    }

    rep.r_sup = sup_norm(r_acc);
    rep.t_sup = sup_norm(t_acc);

    double wsup = 0, wcsup = 0, dsup = 0, vnext = 0, thnext = 0, v1n = 0, th1 = 0;
#pragma omp parallel for reduction(max : wsup, wcsup, dsup, vnext, thnext)
    for (std::size_t idx = 0; idx < np; ++idx) {
        wsup = std::max(wsup, norm(g.w_at(idx)));
        wcsup = std::max(wcsup, norm(g.w_c.at(idx)));
        dsup = std::max(dsup, std::abs(g.d[idx]));
        const Vec3 vbar{P.glue().v[0][idx], P.glue().v[1][idx], P.glue().v[2][idx]};
        vnext = std::max(vnext, norm(vbar + g.w_at(idx)));
        thnext = std::max(thnext, std::abs(P.glue().theta[idx] + g.d[idx]));
    }
    rep.w_sup = wsup;
    rep.w_c_sup = wcsup;
    rep.d_sup = dsup;
    rep.v_next_sup = vnext;
    rep.th_next_sup = thnext;
    // C1 of the next iterate: spectral gradient of vbar plus the wave gradient
    {
        double g1 = 0;
        for (int c = 0; c < 3; ++c) {
            VectorField gv = gradient(P.glue().v[c]);
            for (int m = 0; m < 3; ++m) g1 = std::max(g1, sup_norm(gv[m]));
        }
        rep.v1_next_sup = g1 + rep.w1_sup;
        double gt = 0;
        VectorField gth2 = gradient(P.glue().theta);
        for (int m = 0; m < 3; ++m) gt = std::max(gt, sup_norm(gth2[m]));
        rep.th1_next_sup = gt + rep.d1_sup;
        (void)v1n;
        (void)th1;
    }
    return rep;
}

}  // namespace torusflux
