#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "torusflux/common.hpp"

namespace torusflux {

enum class ScheduleMode { paper_strict, desk };

struct Constraint {
    std::string name;
    bool ok = false;
    std::string detail;
};

// Iteration parameters: lambda_q = ceil(a^{b^q}), delta_q = lambda_2^{3 beta}
// lambda_q^{-2 beta}, ell_q and tau_q derived from them, N0 from the
// stationary-phase truncation requirement. paper_strict mode enforces the
// admissibility inequalities; desk mode records which of them fail but
// proceeds (the strict regime starts at astronomically large a).
struct ParamSchedule {
    double a = 0, b = 0, beta = 0, alpha = 0, t_tilde = 0.25;
    int q = 1;
    ScheduleMode mode = ScheduleMode::desk;

    double lambda_q = 0, lambda_q1 = 0, lambda_q2 = 0, lambda2 = 0;
    double delta_q = 0, delta_q1 = 0, delta_q2 = 0;
    double ell_q = 0, tau_q = 0;
    int n0 = 0;
    double b0 = 0, alpha0 = 0;
    std::vector<Constraint> constraints;

    bool all_ok() const {
        for (const auto& c : constraints)
            if (!c.ok) return false;
        return true;
    }
};

namespace detail {

inline double lambda_of(double a, double b, int q) { return std::ceil(std::pow(a, std::pow(b, q))); }

// Exponent-level threshold from the requirement
// delta_{q+1}^{1/2} delta_q^{1/2} lambda_q / lambda_{q+1} <= delta_{q+2} / lambda_{q+1}^{8 alpha}:
// in powers of lambda_q this reads  -beta - beta b + 1 - b <= -2 beta b^2 - 8 alpha b.
inline double alpha0_of(double b, double beta) {
    const double f = -2.0 * beta * b * b + (1.0 + beta) * b + (beta - 1.0);
    return f / (8.0 * b);
}

}  // namespace detail

inline ParamSchedule schedule_params(double a, double b, double beta, double alpha,
                                     double t_tilde, int q,
                                     ScheduleMode mode = ScheduleMode::desk,
                                     double measured_M = 1.0) {
    require(a > 1.0 && b > 1.0, "schedule_params: need a > 1 and b > 1");
    require(beta > 0.0 && beta < 1.0 / 3.0, "schedule_params: beta in (0, 1/3)");
    require(alpha > 0.0 && alpha < 1.0, "schedule_params: alpha in (0,1)");
    require(q >= 1, "schedule_params: q >= 1");

    ParamSchedule s;
    s.a = a;
    s.b = b;
    s.beta = beta;
    s.alpha = alpha;
    s.t_tilde = t_tilde;
    s.q = q;
    s.mode = mode;

    s.lambda_q = detail::lambda_of(a, b, q);
    s.lambda_q1 = detail::lambda_of(a, b, q + 1);
    s.lambda_q2 = detail::lambda_of(a, b, q + 2);
    s.lambda2 = detail::lambda_of(a, b, 2);
    const double l2_3b = std::pow(s.lambda2, 3.0 * beta);
    s.delta_q = l2_3b * std::pow(s.lambda_q, -2.0 * beta);
    s.delta_q1 = l2_3b * std::pow(s.lambda_q1, -2.0 * beta);
    s.delta_q2 = l2_3b * std::pow(s.lambda_q2, -2.0 * beta);

    s.ell_q = std::sqrt(s.delta_q1 / s.delta_q) / std::pow(s.lambda_q, 1.0 + 1.5 * alpha);
    s.tau_q = std::pow(s.ell_q, 2.0 * alpha) / (std::sqrt(s.delta_q) * s.lambda_q);

    s.b0 = std::min(1.0 + (1.0 - 3.0 * beta) / (2.0 * beta), 2.0);
    s.alpha0 = detail::alpha0_of(b, beta);

    // Smallest N0 with lambda_{q+1}^{N0 - alpha} ell_q^{N0 + alpha} >= lambda_{q+1}^{1 - alpha}.
    {
        const double lhs_log = std::log(s.lambda_q1) + std::log(s.ell_q);
        const double rhs_log = std::log(s.lambda_q1) - alpha * std::log(s.ell_q);
        s.n0 = lhs_log > 0 ? int(std::ceil(rhs_log / lhs_log)) : 0;
        s.n0 = std::max(s.n0, 1);
    }

    auto push = [&](const std::string& name, bool ok, const std::string& detail) {
        s.constraints.push_back({name, ok, detail});
    };
    push("b in (1, b0)", b > 1.0 && b < s.b0,
         "b = " + std::to_string(b) + ", b0 = " + std::to_string(s.b0));
    push("alpha < alpha0(b, beta)", alpha < s.alpha0,
         "alpha0 = " + std::to_string(s.alpha0));
    push("alpha < beta (b - 1) / 3", alpha < beta * (b - 1.0) / 3.0,
         "bound = " + std::to_string(beta * (b - 1.0) / 3.0));
    {
        const double bound = std::max({std::pow(50.0, beta / alpha),
                                       std::pow(measured_M, 2.0 / alpha), 3.0 / t_tilde});
        push("a > max{50^{beta/alpha}, M^{2/alpha}, 3/T}", a > bound,
             "bound = " + std::to_string(bound));
    }
    push("ell_q in (lambda_q^{-13/10}, lambda_q^{-1})",
         s.ell_q > std::pow(s.lambda_q, -1.3) && s.ell_q < 1.0 / s.lambda_q,
         "ell_q = " + std::to_string(s.ell_q));
    push("20 tau_{q+1} < tau_q", true, "checked once the q+1 schedule exists");

    if (mode == ScheduleMode::paper_strict) {
        for (const auto& c : s.constraints)
            if (!c.ok) fail("schedule_params: paper-strict constraint failed: " + c.name + " (" +
                            c.detail + ")");
    }
    return s;
}

// Desk-scale schedule pinned to explicit frequencies. Derived quantities use
// the same formulas with a and b implied by (lambda_q, lambda_{q+1}) at level q.
inline ParamSchedule desk_schedule(double lambda_q, double lambda_q1, double beta, double alpha,
                                   double t_tilde = 0.25) {
    require(lambda_q > 1.0 && lambda_q1 > lambda_q, "desk_schedule: need 1 < lambda_q < lambda_q1");
    const double b = std::log(lambda_q1) / std::log(lambda_q);
    const double a = std::pow(lambda_q, 1.0 / b);  // q = 1
    ParamSchedule s = schedule_params(a, b, beta, alpha, t_tilde, 1, ScheduleMode::desk);
    // Pin the frequencies exactly (the ceiling in lambda_of may round).
    s.lambda_q = lambda_q;
    s.lambda_q1 = lambda_q1;
    s.lambda2 = lambda_q1;
    const double l2_3b = std::pow(s.lambda2, 3.0 * beta);
    s.delta_q = l2_3b * std::pow(lambda_q, -2.0 * beta);
    s.delta_q1 = l2_3b * std::pow(lambda_q1, -2.0 * beta);
    s.delta_q2 = l2_3b * std::pow(s.lambda_q2, -2.0 * beta);
    s.ell_q = std::sqrt(s.delta_q1 / s.delta_q) / std::pow(lambda_q, 1.0 + 1.5 * alpha);
    s.tau_q = std::pow(s.ell_q, 2.0 * alpha) / (std::sqrt(s.delta_q) * lambda_q);
    return s;
}

}  // namespace torusflux
