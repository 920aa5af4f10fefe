#pragma once

#include <functional>
#include <map>
#include <memory>

#include "torusflux/boussinesq.hpp"
#include "torusflux/mollifier.hpp"
#include "torusflux/schedule.hpp"

namespace torusflux {

namespace detail {

// C-infinity ramp 0 -> 1 on [0,1] with analytic first derivative; the second
// derivative is finite-differenced (used only in reported quantities).
inline double ramp(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

inline double ramp_d(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
    const double ap = a / (t * t), bp = -b / ((1.0 - t) * (1.0 - t));
    return (ap * b - a * bp) / ((a + b) * (a + b));
}

inline double ramp_dd(double t) {
    const double h = 1e-6;
    return (ramp_d(t + h) - ramp_d(t - h)) / (2.0 * h);
}

}  // namespace detail

// Gluing time geometry: t_i = 2 T + i tau, the I_i / J_i intervals, the exact
// partition chi_i (built from one shared ramp per I_i, so the partition
// telescopes to 1 identically) and the perturbation windows eta_i.
struct GluingWindows {
    double t_tilde = 0.25;
    double tau = 0.05;
    int i_max = 2;

    GluingWindows() = default;
    GluingWindows(double t_tilde_, double tau_) : t_tilde(t_tilde_), tau(tau_) {
        int i = 1;
        int last = 0;
        while (t_i(i) <= 3.0 * t_tilde) {
            const double gap = 3.0 * t_tilde - t_i(i);
            if (gap >= tau && gap < 2.0 * tau) last = i;
            ++i;
            require(i < 100000, "GluingWindows: tau too small");
        }
        require(last >= 1, "GluingWindows: no admissible i_max (tau too large for T)");
        i_max = last + 1;
    }

    double t0() const { return 2.0 * t_tilde; }
    double t_i(int i) const { return t0() + i * tau; }

    // up-ramp on I_i = [t_i + tau/3, t_i + 2 tau/3]
    double up(int i, double t) const { return detail::ramp((t - (t_i(i) + tau / 3)) / (tau / 3)); }
    double up_d(int i, double t) const {
        return detail::ramp_d((t - (t_i(i) + tau / 3)) / (tau / 3)) * 3.0 / tau;
    }
    double up_dd(int i, double t) const {
        return detail::ramp_dd((t - (t_i(i) + tau / 3)) / (tau / 3)) * 9.0 / (tau * tau);
    }

    double chi(int i, double t) const {
        const double lower = i == 0 ? 1.0 : up(i - 1, t);
        const double upper = i == i_max ? 0.0 : up(i, t);
        return lower - upper;
    }
    double chi_d(int i, double t) const {
        const double lower = i == 0 ? 0.0 : up_d(i - 1, t);
        const double upper = i == i_max ? 0.0 : up_d(i, t);
        return lower - upper;
    }
    double chi_dd(int i, double t) const {
        const double lower = i == 0 ? 0.0 : up_dd(i - 1, t);
        const double upper = i == i_max ? 0.0 : up_dd(i, t);
        return lower - upper;
    }

    // eta_i: 1 on I_i, supported on I_i +- tau/6, i = 0 .. i_max - 1
    double eta(int i, double t) const {
        const double s = (t - (t_i(i) + tau / 6)) / (tau / 6);
        const double e = (t - (t_i(i) + 2 * tau / 3)) / (tau / 6);
        return detail::ramp(s) - detail::ramp(e);
    }
    double eta_d(int i, double t) const {
        const double s = (t - (t_i(i) + tau / 6)) / (tau / 6);
        const double e = (t - (t_i(i) + 2 * tau / 3)) / (tau / 6);
        return (detail::ramp_d(s) - detail::ramp_d(e)) * 6.0 / tau;
    }

    // transition interval index: t in I_i for some i < i_max, else -1 (inside a J)
    int transition_interval(double t) const {
        for (int i = 0; i < i_max; ++i)
            if (t >= t_i(i) + tau / 3 && t <= t_i(i) + 2 * tau / 3) return i;
        return -1;
    }
};

// An exact Boussinesq flow queryable at arbitrary time.
struct FlowProvider {
    virtual ~FlowProvider() = default;
    virtual BoussinesqState at(double t) = 0;
    virtual TorusGrid grid() const = 0;
};

struct ZeroFlow final : FlowProvider {
    TorusGrid grid_;
    explicit ZeroFlow(const TorusGrid& g) : grid_(g) {}
    TorusGrid grid() const override { return grid_; }
    BoussinesqState at(double t) override {
        BoussinesqState s;
        s.t = t;
        s.v = VectorField(grid_);
        s.theta = ScalarField(grid_);
        s.p = ScalarField(grid_);
        return s;
    }
};

struct ShearFlow final : FlowProvider {
    TorusGrid grid_;
    double amplitude;
    std::function<double(double)> f;
    ShearFlow(const TorusGrid& g, double a, std::function<double(double)> prof)
        : grid_(g), amplitude(a), f(std::move(prof)) {}
    TorusGrid grid() const override { return grid_; }
    BoussinesqState at(double t) override { return shear_flow_state(grid_, amplitude, f, t); }
};

// Numerically integrated exact flow with checkpointing; deterministic for a
// fixed (initial state, dt).
class SolvedFlow final : public FlowProvider {
  public:
    SolvedFlow(BoussinesqState init, double dt, double checkpoint_every = 0.05)
        : dt_(dt), stride_(checkpoint_every), grid_(init.v.grid) {
        checkpoints_[init.t] = std::move(init);
    }

    TorusGrid grid() const override { return grid_; }

    BoussinesqState at(double t) override {
        // nearest checkpoint (either side; the solver runs both directions)
        auto best = checkpoints_.begin();
        for (auto it = checkpoints_.begin(); it != checkpoints_.end(); ++it)
            if (std::abs(it->first - t) < std::abs(best->first - t)) best = it;
        BoussinesqState s = best->second;
        while (std::abs(t - s.t) > 1e-12) {
            const double remaining = t - s.t;
            const double step = std::clamp(remaining, -dt_, dt_);
            s = step_rk4(s, step);
            if (std::abs(s.t - last_checkpoint_) >= stride_) {
                last_checkpoint_ = s.t;
                checkpoints_.emplace(s.t, s);
            }
        }
        s.t = t;
        return s;
    }

  private:
    double dt_, stride_;
    TorusGrid grid_;
    double last_checkpoint_ = -1e30;
    std::map<double, BoussinesqState> checkpoints_;
};

// One relaxed time slice with the time derivatives the residual and stress
// machinery need.
struct RelaxedSlice {
    double t = 0;
    VectorField v;
    ScalarField theta, p;
    SymMatrixField reynolds;
    VectorField temp_stress;
    VectorField dv_dt;
    ScalarField dtheta_dt;
    SymMatrixField dreynolds_dt;
    VectorField dtemp_stress_dt;
};

// Shared two-flow gluing algebra: given the two exact flows and the cutoff
// value with derivatives, produce the glued fields, the stresses
//   R = chi' R(vd) - chi (1 - chi) vd (o) vd,    T analogous,
//   p = chi p1 + (1-chi) p2 + (1/3) chi (1-chi) |vd|^2   (mean removed),
// and their time derivatives.
inline RelaxedSlice glue_pair(const BoussinesqState& s1, const BoussinesqState& s2, double t,
                              double chi, double chi_d, double chi_dd) {
    const TorusGrid& g = s1.v.grid;
    RelaxedSlice out;
    out.t = t;

    auto [rhs1v, rhs1t] = boussinesq_rhs(s1.v, s1.theta);
    auto [rhs2v, rhs2t] = boussinesq_rhs(s2.v, s2.theta);

    VectorField vd = s1.v - s2.v;
    ScalarField thd = s1.theta - s2.theta;
    VectorField dvd = rhs1v - rhs2v;
    ScalarField dthd = rhs1t - rhs2t;

    out.v = s1.v * chi + s2.v * (1.0 - chi);
    out.theta = s1.theta * chi + s2.theta * (1.0 - chi);
    out.dv_dt = vd * chi_d + rhs1v * chi + rhs2v * (1.0 - chi);
    out.dtheta_dt = thd * chi_d + rhs1t * chi + rhs2t * (1.0 - chi);

    // pressure: trace bookkeeping puts +1/3 chi(1-chi)|vd|^2 on the left
    ScalarField vd2(g);
#pragma omp parallel for
    for (std::size_t i = 0; i < vd2.v.size(); ++i)
        vd2.v[i] = vd[0][i] * vd[0][i] + vd[1][i] * vd[1][i] + vd[2][i] * vd[2][i];
    vd2 = project_band(vd2);
    out.p = s1.p * chi + s2.p * (1.0 - chi) + vd2 * (chi * (1.0 - chi) / 3.0);
    const double pmean = mean(out.p);
    for (auto& x : out.p.v) x -= pmean;

    const double c1 = chi * (1.0 - chi);
    const double c1_d = chi_d * (1.0 - 2.0 * chi);

    out.reynolds = inverse_div_R(vd) * chi_d;
    out.reynolds -= outer_trace_free(vd, vd) * c1;
    out.reynolds.trace_free = true;
    out.dreynolds_dt = inverse_div_R(vd) * chi_dd + inverse_div_R(dvd) * chi_d;
    out.dreynolds_dt -= outer_trace_free(vd, vd) * c1_d;
    out.dreynolds_dt -= (outer_trace_free(dvd, vd) + outer_trace_free(vd, dvd)) * c1;

    out.temp_stress = inverse_div_Rvex(thd) * chi_d - multiply_dealiased(vd, thd) * c1;
    out.dtemp_stress_dt = inverse_div_Rvex(thd) * chi_dd + inverse_div_Rvex(dthd) * chi_d;
    out.dtemp_stress_dt -= multiply_dealiased(vd, thd) * c1_d;
    out.dtemp_stress_dt -=
        (multiply_dealiased(dvd, thd) + multiply_dealiased(vd, dthd)) * c1;
    return out;
}

inline RelaxedSlice exact_slice(const BoussinesqState& s) {
    RelaxedSlice out;
    out.t = s.t;
    out.v = s.v;
    out.theta = s.theta;
    out.p = s.p;
    out.reynolds = SymMatrixField(s.v.grid);
    out.reynolds.trace_free = true;
    out.temp_stress = VectorField(s.v.grid);
    auto [dv, dth] = boussinesq_rhs(s.v, s.theta);
    out.dv_dt = std::move(dv);
    out.dtheta_dt = std::move(dth);
    out.dreynolds_dt = SymMatrixField(s.v.grid);
    out.dtemp_stress_dt = VectorField(s.v.grid);
    return out;
}

// The level-q toy stage: two exact flows joined by one time cutoff with
// plateau 1 on [0, 2T + tau] and 0 from [3T - 2 tau, 1].
class StageQ {
  public:
    StageQ(std::shared_ptr<FlowProvider> flow1, std::shared_ptr<FlowProvider> flow2,
           const ParamSchedule& sched)
        : f1_(std::move(flow1)), f2_(std::move(flow2)), sched_(sched) {
        lo_ = 2.0 * sched.t_tilde + sched.tau_q;
        hi_ = 3.0 * sched.t_tilde - 2.0 * sched.tau_q;
        require(hi_ > lo_, "StageQ: tau_q too large for the handoff window");
    }

    double chi(double t) const { return 1.0 - detail::ramp((t - lo_) / (hi_ - lo_)); }
    double chi_d(double t) const { return -detail::ramp_d((t - lo_) / (hi_ - lo_)) / (hi_ - lo_); }
    double chi_dd(double t) const {
        return -detail::ramp_dd((t - lo_) / (hi_ - lo_)) / ((hi_ - lo_) * (hi_ - lo_));
    }

    RelaxedSlice slice(double t) {
        return glue_pair(f1_->at(t), f2_->at(t), t, chi(t), chi_d(t), chi_dd(t));
    }

    const ParamSchedule& schedule() const { return sched_; }
    TorusGrid grid() const { return f1_->grid(); }
    FlowProvider& flow1() { return *f1_; }
    FlowProvider& flow2() { return *f2_; }

  private:
    std::shared_ptr<FlowProvider> f1_, f2_;
    ParamSchedule sched_;
    double lo_, hi_;
};

// Spatial mollification of a relaxed slice with the commutator-corrected
// stresses; the mollified quintuple solves the same system exactly.
inline RelaxedSlice mollify_slice(const RelaxedSlice& s, double ell) {
    RelaxedSlice out;
    out.t = s.t;
    out.v = mollify_space(s.v, ell);
    out.theta = mollify_space(s.theta, ell);
    out.dv_dt = mollify_space(s.dv_dt, ell);
    out.dtheta_dt = mollify_space(s.dtheta_dt, ell);

    const TorusGrid& g = s.v.grid;
    ScalarField v2(g), vl2(g);
#pragma omp parallel for
    for (std::size_t i = 0; i < v2.v.size(); ++i)
        v2.v[i] = s.v[0][i] * s.v[0][i] + s.v[1][i] * s.v[1][i] + s.v[2][i] * s.v[2][i];
#pragma omp parallel for
    for (std::size_t i = 0; i < vl2.v.size(); ++i)
        vl2.v[i] = out.v[0][i] * out.v[0][i] + out.v[1][i] * out.v[1][i]
                   + out.v[2][i] * out.v[2][i];
    out.p = mollify_space(s.p, ell)
            + (mollify_space(project_band(v2), ell) - project_band(vl2)) * (1.0 / 3.0);
    const double pmean = mean(out.p);
    for (auto& x : out.p.v) x -= pmean;

    out.reynolds = mollify_space(s.reynolds, ell) - mollify_space(outer_trace_free(s.v, s.v), ell)
                   + outer_trace_free(out.v, out.v);
    out.reynolds.trace_free = true;
    out.temp_stress = mollify_space(s.temp_stress, ell)
                      - mollify_space(multiply_dealiased(s.v, s.theta), ell)
                      + multiply_dealiased(out.v, out.theta);
    out.dreynolds_dt = SymMatrixField(g);
    out.dtemp_stress_dt = VectorField(g);
    return out;
}

// One full glued stage: local exact flows launched from the mollified data at
// the t_i, patched by the chi partition. Slices carry the glued stresses.
class GluedStage {
  public:
    GluedStage(StageQ& stage, std::shared_ptr<FlowProvider> endpoint1,
               std::shared_ptr<FlowProvider> endpoint2, double solver_dt)
        : stage_(stage), end1_(std::move(endpoint1)), end2_(std::move(endpoint2)),
          win_(stage.schedule().t_tilde, stage.schedule().tau_q),
          ell_(stage.schedule().ell_q), dt_(solver_dt) {}

    const GluingWindows& windows() const { return win_; }
    const ParamSchedule& schedule() const { return stage_.schedule(); }
    TorusGrid grid() const { return stage_.grid(); }

    // v_i: endpoint flows are the stage's own exact flows, interior flows are
    // launched from the mollified stage data at t_i.
    BoussinesqState local_flow(int i, double t) {
        require(i >= 0 && i <= win_.i_max, "local_flow: index out of range");
        if (i == 0) return end1_->at(t);
        if (i == win_.i_max) return end2_->at(t);
        auto it = interior_.find(i);
        if (it == interior_.end()) {
            RelaxedSlice mol = mollify_slice(stage_.slice(win_.t_i(i)), ell_);
            BoussinesqState init;
            init.t = win_.t_i(i);
            init.v = mol.v;
            init.theta = mol.theta;
            init.p = pressure_from(mol.v, mol.theta);
            it = interior_.emplace(i, std::make_shared<SolvedFlow>(std::move(init), dt_)).first;
        }
        return it->second->at(t);
    }

    // glued fields + stresses at t; inside a J interval this is an exact flow.
    RelaxedSlice slice(double t) {
        const int i = win_.transition_interval(t);
        if (i < 0) {
            for (int j = 0; j <= win_.i_max; ++j)
                if (win_.chi(j, t) > 0.5) return exact_slice(local_flow(j, t));
            fail("GluedStage::slice: no active cutoff");
        }
        return glue_pair(local_flow(i, t), local_flow(i + 1, t), t, win_.chi(i, t),
                         win_.chi_d(i, t), win_.chi_dd(i, t));
    }

    // velocity only (for flow-map characteristics)
    VectorField velocity(double t) {
        const int i = win_.transition_interval(t);
        if (i < 0) {
            for (int j = 0; j <= win_.i_max; ++j)
                if (win_.chi(j, t) > 0.5) return local_flow(j, t).v;
            fail("GluedStage::velocity: no active cutoff");
        }
        const double c = win_.chi(i, t);
        return local_flow(i, t).v * c + local_flow(i + 1, t).v * (1.0 - c);
    }

  private:
    StageQ& stage_;
    std::shared_ptr<FlowProvider> end1_, end2_;
    GluingWindows win_;
    double ell_, dt_;
    std::map<int, std::shared_ptr<SolvedFlow>> interior_;
};

}  // namespace torusflux
