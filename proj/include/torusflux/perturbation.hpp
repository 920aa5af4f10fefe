#pragma once

#include "torusflux/directions.hpp"
#include "torusflux/flow_map.hpp"
#include "torusflux/gluing.hpp"
#include "torusflux/profile.hpp"

namespace torusflux {

// Everything the wave assembly needs at one probe time inside one eta window.
// The deformed blocks W(Phi) live far above the grid Nyquist frequency, so all
// wave quantities are evaluated pointwise from the smooth cofactor fields and
// the analytic 1-D profile; spatial derivatives of smooth cofactors are
// spectral, derivatives of the oscillatory factors are exact chain rules.
class Perturbation {
  public:
    Perturbation(GluedStage& glued, const DirectionSet& dirs, const Placement& place,
                 const BuildingBlockProfile& prof, double lambda, int i, double t,
                 int flow_substeps = 8)
        : glued_(&glued), dirs_(&dirs), place_(&place), prof_(&prof), lambda_(lambda), i_(i),
          t_(t), grid_(glued.grid()), sched_(glued.schedule()) {
        const GluingWindows& win = glued.windows();
        require(i >= 0 && i < win.i_max, "Perturbation: eta window index out of range");
        eta_ = win.eta(i, t);
        eta_d_ = win.eta_d(i, t);
        require(eta_ > 0.0, "Perturbation: probe time outside supp eta_i");

        glue_ = glued.slice(t);
        map_ = solve_flow_map(glued, i, t, flow_substeps);
        prepare_fields();
    }

    const RelaxedSlice& glue() const { return glue_; }
    const FlowMapSlice& map() const { return map_; }
    double eta() const { return eta_; }
    double rv_ball_margin() const { return rv_margin_; }
    double amp_theta() const {
        return std::pow(sched_.delta_q1, -0.5) * std::pow(sched_.ell_q, -0.5 * sched_.alpha);
    }
    double amp_v() const {
        return std::pow(sched_.delta_q1, 0.5) * std::pow(sched_.ell_q, 0.5 * sched_.alpha);
    }

    // --- pointwise frames -------------------------------------------------
    Mat3 grad_phi(std::size_t idx) const { return map_.grad_at(idx); }

    static Mat3 adjugate(const Mat3& a) {
        Mat3 r;
        r(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
        r(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
        r(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
        r(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
        r(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
        r(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
        r(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
        r(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
        r(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        return r;
    }

    // family argument U_c = lambda (arg_c . Phi - sigma_c) and its gradient
    double arg_u(const BlockFamily& f, int which, std::size_t idx) const {
        const Vec3 a = which == 0 ? f.arg1 : f.arg2;
        const Vec3 x = point_of(idx);
        const Vec3 phi{x.x + map_.disp[0][idx], x.y + map_.disp[1][idx], x.z + map_.disp[2][idx]};
        const double sigma = which == 0 ? f.sigma1 : f.sigma2;
        // shifts live at the oscillation scale (x^k -> x^k / lambda), so the
        // deformed pattern inherits the scale-1 disjointness certificate
        return lambda_ * dot(a, phi) - sigma;
    }
    Vec3 arg_grad(const BlockFamily& f, int which, std::size_t idx) const {
        const Vec3 a = which == 0 ? f.arg1 : f.arg2;
        return grad_phi(idx).transposed() * a * lambda_;
    }

    // scalar amplitude G_f: tcal_k eta (theta) or a_{v,k} eta (v), without the
    // delta/ell prefactor
    double amp_field(const BlockFamily& f, std::size_t idx) const {
        return f.theta_type ? tcal_[f.dir_index][idx] : a_coef_[f.dir_index][idx];
    }
    Vec3 amp_grad(const BlockFamily& f, std::size_t idx) const {
        const int base = f.dir_index * 3;
        if (f.theta_type)
            return {grad_tcal_[base][idx], grad_tcal_[base + 1][idx], grad_tcal_[base + 2][idx]};
        return {grad_a_[base][idx], grad_a_[base + 1][idx], grad_a_[base + 2][idx]};
    }
    double amp_matd(const BlockFamily& f, std::size_t idx) const {
        return f.theta_type ? matd_tcal_[f.dir_index][idx] : matd_a_[f.dir_index][idx];
    }

    const ScalarField& tcal(int k) const { return tcal_[k]; }
    const SymMatrixField& r_v() const { return r_v_; }
    const ScalarField& a_coef(int k) const { return a_coef_[k]; }
    Vec3 point_of(std::size_t idx) const {
        const int n = grid_.n;
        const std::size_t iz = idx % n, iy = (idx / n) % n, ix = idx / (std::size_t(n) * n);
        return grid_.point(int(ix), int(iy), int(iz));
    }

    // matd grad Phi (pointwise): matd (d_m Phi^c) = - sum_r d_m vbar^r d_r Phi^c
    Mat3 matd_grad_phi(std::size_t idx) const {
        Mat3 gv = grad_v_at(idx);
        Mat3 gp = grad_phi(idx);
        Mat3 r;
        for (int c = 0; c < 3; ++c)
            for (int m = 0; m < 3; ++m) {
                double s = 0;
                for (int rr = 0; rr < 3; ++rr) s += gv(rr, m) * gp(c, rr);
                r(c, m) = -s;
            }
        return r;
    }

    Mat3 grad_v_at(std::size_t idx) const {
        Mat3 r;
        for (int c = 0; c < 3; ++c)
            for (int m = 0; m < 3; ++m) r(c, m) = grad_v_[c * 3 + m][idx];
        return r;
    }

    const TorusGrid& grid() const { return grid_; }
    const ParamSchedule& sched() const { return sched_; }
    const Placement& placement() const { return *place_; }
    const BuildingBlockProfile& profile() const { return *prof_; }
    const DirectionSet& dirs() const { return *dirs_; }
    double lambda() const { return lambda_; }
    int window() const { return i_; }
    double time() const { return t_; }
    double eta_deriv() const { return eta_d_; }
    const std::array<ScalarField, 18>& hess() const { return hess_; }

    // d_m d_l Phi^c with (l <= m) storage
    double hess_at(std::size_t idx, int c, int l, int m) const {
        if (l > m) std::swap(l, m);
        static const int off[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
        return hess_[c * 6 + off[l][m]][idx];
    }

  private:
    void prepare_fields() {
        const std::size_t np = grid_.points();

        // grad vbar (spectral)
        for (int c = 0; c < 3; ++c) {
            VectorField g = gradient(glue_.v[c]);
            for (int m = 0; m < 3; ++m) grad_v_[c * 3 + m] = g[m];
        }
        // hessian of Phi: spectral gradients of the Jacobian entries
        for (int c = 0; c < 3; ++c) {
            // grad of disp gradient rows; hess is symmetric in (l, m)
            VectorField g0 = gradient(map_.grad[c * 3 + 0]);
            VectorField g1 = gradient(map_.grad[c * 3 + 1]);
            VectorField g2 = gradient(map_.grad[c * 3 + 2]);
            hess_[c * 6 + 0] = g0[0];
            hess_[c * 6 + 1] = 0.5 * (g0[1] + g1[0]);
            hess_[c * 6 + 2] = 0.5 * (g0[2] + g2[0]);
            hess_[c * 6 + 3] = g1[1];
            hess_[c * 6 + 4] = 0.5 * (g1[2] + g2[1]);
            hess_[c * 6 + 5] = g2[2];
        }

        // d_t grad Phi = -grad(vbar . grad Phi) evaluated spectrally
        for (int c = 0; c < 3; ++c) {
            ScalarField adv(grid_);
#pragma omp parallel for
            for (std::size_t idx = 0; idx < np; ++idx) {
                const Mat3 gp = grad_phi(idx);
                adv.v[idx] = glue_.v[0][idx] * gp(c, 0) + glue_.v[1][idx] * gp(c, 1)
                             + glue_.v[2][idx] * gp(c, 2);
            }
            VectorField g = gradient(project_band(adv));
            for (int m = 0; m < 3; ++m) dgradphi_dt_[c * 3 + m] = g[m] * -1.0;
        }

        // tcal_k = -(grad Phi Tbar)_k / det and R_v
        const double dell = sched_.delta_q1 * std::pow(sched_.ell_q, sched_.alpha);
        for (int k = 0; k < 3; ++k) tcal_[k] = ScalarField(grid_);
        r_v_ = SymMatrixField(grid_);
        double margin = 1e30;
#pragma omp parallel for reduction(min : margin)
        for (std::size_t idx = 0; idx < np; ++idx) {
            const Mat3 gp = grad_phi(idx);
            const double det = gp.det();
            const Vec3 tb{glue_.temp_stress[0][idx], glue_.temp_stress[1][idx],
                          glue_.temp_stress[2][idx]};
            const Vec3 tc = gp * tb * (-1.0 / det);
            for (int k = 0; k < 3; ++k) tcal_[k].v[idx] = tc[k];

            // R_v = det^{-2} gradPhi (Id - R/dell) gradPhi^T
            //       - dell^{-2} sum_k tcal_k^2 eta^2 k (x) k
            Mat3 inner = Mat3::identity() - glue_.reynolds.at(idx).full() * (1.0 / dell);
            Mat3 rv = gp * inner * gp.transposed() * (1.0 / (det * det));
            const double e2 = eta_ * eta_;
            for (int k = 0; k < 3; ++k) rv(k, k) -= tc[k] * tc[k] * e2 / (dell * dell);
            Sym3 rvs = Sym3::from_full_symmetric(rv);
            r_v_.set(idx, rvs);
            Sym3 dev = rvs;
            dev.s[0] -= 1;
            dev.s[1] -= 1;
            dev.s[2] -= 1;
            margin = std::min(margin, dirs_->eps_v - dev.frobenius());
        }
        rv_margin_ = margin;
        require(margin > 0.0, "Perturbation: R_v exits the geometric-lemma ball");

        // a_{v,k}(R_v) pointwise
        for (int k = 0; k < 6; ++k) a_coef_[k] = ScalarField(grid_);
#pragma omp parallel for
        for (std::size_t idx = 0; idx < np; ++idx) {
            const auto a = dirs_->coefficients(r_v_.at(idx), false);
            for (int k = 0; k < 6; ++k) a_coef_[k].v[idx] = a[k];
        }

        // spatial gradients of the composite amplitudes (spectral)
        for (int k = 0; k < 3; ++k) {
            VectorField g = gradient(project_band(tcal_[k]));
            for (int m = 0; m < 3; ++m) grad_tcal_[k * 3 + m] = g[m];
        }
        for (int k = 0; k < 6; ++k) {
            VectorField g = gradient(project_band(a_coef_[k]));
            for (int m = 0; m < 3; ++m) grad_a_[k * 3 + m] = g[m];
        }

        prepare_matd();
    }

    // material derivatives of tcal and a (for the stress transport terms)
    void prepare_matd() {
        const std::size_t np = grid_.points();
        const double dell = sched_.delta_q1 * std::pow(sched_.ell_q, sched_.alpha);

        // matd R (Reynolds) and matd T as fields
        SymMatrixField matd_r = glue_.dreynolds_dt;
        VectorField matd_t = glue_.dtemp_stress_dt;
        for (int c = 0; c < 6; ++c) {
            VectorField g = gradient(glue_.reynolds[c]);
            ScalarField adv(grid_);
#pragma omp parallel for
            for (std::size_t idx = 0; idx < np; ++idx)
                adv.v[idx] = glue_.v[0][idx] * g[0][idx] + glue_.v[1][idx] * g[1][idx]
                             + glue_.v[2][idx] * g[2][idx];
            matd_r[c] += adv;
        }
        for (int c = 0; c < 3; ++c) {
            VectorField g = gradient(glue_.temp_stress[c]);
            ScalarField adv(grid_);
#pragma omp parallel for
            for (std::size_t idx = 0; idx < np; ++idx)
                adv.v[idx] = glue_.v[0][idx] * g[0][idx] + glue_.v[1][idx] * g[1][idx]
                             + glue_.v[2][idx] * g[2][idx];
            matd_t[c] += adv;
        }

        for (int k = 0; k < 3; ++k) matd_tcal_[k] = ScalarField(grid_);
        for (int k = 0; k < 6; ++k) matd_a_[k] = ScalarField(grid_);
#pragma omp parallel for
        for (std::size_t idx = 0; idx < np; ++idx) {
            const Mat3 gp = grad_phi(idx);
            const Mat3 mgp = matd_grad_phi(idx);
            const double det = gp.det();
            // matd det = tr(adj(gp) matd gp)
            const Mat3 adj = adjugate(gp);
            double mdet = 0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) mdet += adj(a, b) * mgp(b, a);
            const Vec3 tb{glue_.temp_stress[0][idx], glue_.temp_stress[1][idx],
                          glue_.temp_stress[2][idx]};
            const Vec3 mtb{matd_t[0][idx], matd_t[1][idx], matd_t[2][idx]};
            const Vec3 m1 = mgp * tb + gp * mtb;
            const Vec3 tc = gp * tb;
            for (int k = 0; k < 3; ++k)
                matd_tcal_[k].v[idx] = -(m1[k] * det - tc[k] * mdet) / (det * det);

            // matd R_v via the product rule on det^{-2} gp (Id - R/dell) gp^T
            const Mat3 inner = Mat3::identity() - glue_.reynolds.at(idx).full() * (1.0 / dell);
            const Mat3 minner = matd_r.at(idx).full() * (-1.0 / dell);
            Mat3 mrv = (mgp * inner * gp.transposed() + gp * minner * gp.transposed()
                        + gp * inner * mgp.transposed())
                       * (1.0 / (det * det));
            const Mat3 rv_main = gp * inner * gp.transposed() * (1.0 / (det * det));
            mrv = mrv - rv_main * (2.0 * mdet / det);
            const double e2 = eta_ * eta_;
            const double de2 = 2.0 * eta_ * eta_d_;
            for (int k = 0; k < 3; ++k) {
                const double tck = tcal_[k][idx];
                const double mtck = matd_tcal_[k][idx];
                mrv(k, k) -= (2.0 * tck * mtck * e2 + tck * tck * de2) / (dell * dell);
            }
            // matd a_k = (L^{-1} matd R_v)_k / (2 a_k)
            const auto dc = dirs_->weights(Sym3::from_full_symmetric(mrv));
            for (int k = 0; k < 6; ++k)
                matd_a_[k].v[idx] = dc[k] / (2.0 * a_coef_[k][idx]);
        }
    }

    GluedStage* glued_;
    const DirectionSet* dirs_;
    const Placement* place_;
    const BuildingBlockProfile* prof_;
    double lambda_;
    int i_;
    double t_;
    TorusGrid grid_;
    ParamSchedule sched_;
    double eta_ = 0, eta_d_ = 0, rv_margin_ = 0;

    RelaxedSlice glue_;
    FlowMapSlice map_;
    std::array<ScalarField, 9> grad_v_;
    std::array<ScalarField, 18> hess_;
    std::array<ScalarField, 9> dgradphi_dt_;
    std::array<ScalarField, 3> tcal_;
    std::array<ScalarField, 9> grad_tcal_;
    std::array<ScalarField, 3> matd_tcal_;
    SymMatrixField r_v_;
    std::array<ScalarField, 6> a_coef_;
    std::array<ScalarField, 18> grad_a_;
    std::array<ScalarField, 6> matd_a_;

  public:
    const std::array<ScalarField, 9>& dgradphi_dt() const { return dgradphi_dt_; }
    Mat3 dgradphi_dt_at(std::size_t idx) const {
        Mat3 r;
        for (int c = 0; c < 3; ++c)
            for (int m = 0; m < 3; ++m) r(c, m) = dgradphi_dt_[c * 3 + m][idx];
        return r;
    }
};

}  // namespace torusflux
