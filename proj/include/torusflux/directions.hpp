#pragma once

#include <array>
#include <random>
#include <vector>

#include "torusflux/common.hpp"

namespace torusflux {

// One oscillation direction with its orthonormal frame (k, kb, kbb); all three
// are rational unit vectors and N_Lambda times each is an integer vector.
struct Direction {
    Vec3 k, kb, kbb;
    bool temperature = false;  // Lambda_theta member (waves point along k)
};

namespace detail {

// Partial-pivot solve of a 6x6 system; enough for the fixed frame matrix.
inline std::array<double, 6> solve6(std::array<std::array<double, 6>, 6> m,
                                    std::array<double, 6> rhs) {
    for (int c = 0; c < 6; ++c) {
        int piv = c;
        for (int r = c + 1; r < 6; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        std::swap(m[c], m[piv]);
        std::swap(rhs[c], rhs[piv]);
        require(std::abs(m[c][c]) > 1e-14, "solve6: singular frame matrix");
        for (int r = 0; r < 6; ++r) {
            if (r == c) continue;
            const double f = m[r][c] / m[c][c];
            for (int cc = c; cc < 6; ++cc) m[r][cc] -= f * m[c][cc];
            rhs[r] -= f * rhs[c];
        }
    }
    std::array<double, 6> x{};
    for (int c = 0; c < 6; ++c) x[c] = rhs[c] / m[c][c];
    return x;
}

inline std::array<double, 6> sym_components(const Mat3& m) {
    return {m(0, 0), m(1, 1), m(2, 2), m(0, 1), m(0, 2), m(1, 2)};
}

}  // namespace detail

// Lambda_theta = {e1, e2, e3} and a six-element Lambda_v of rational unit
// vectors whose kb (x) kb span the symmetric matrices; N_Lambda = 5 makes all
// frames integer. The coefficient map R -> {a_{v,k}(R)} solves the 6x6 linear
// system sum c_k kb (x) kb = R and takes square roots; eps_v is half the
// measured positivity margin of the solve at the identity.
struct DirectionSet {
    std::vector<Direction> theta_dirs;  // Lambda_theta
    std::vector<Direction> v_dirs;      // Lambda_v
    int n_lambda = 5;
    double eps_v = 0;        // admissible ball radius around Id (Frobenius)
    double measured_M = 0;   // sampled sup of |a_{v,k}| and first derivatives

    std::array<std::array<double, 6>, 6> frame_matrix{};  // columns: kb_k (x) kb_k

    DirectionSet() {
        theta_dirs = {
            {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, true},
            {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}, true},
            {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}, true},
        };
        // kb pairs chosen per coordinate plane so that {kb (x) kb} has the
        // largest frame determinant among 3-4-5 candidates; the identity then
        // decomposes with all weights exactly 1/2.
        auto v5 = [](double x, double y, double z) { return Vec3{x / 5.0, y / 5.0, z / 5.0}; };
        v_dirs = {
            {v5(4, -3, 0), v5(3, 4, 0), {0, 0, 1}, false},
            {v5(-4, -3, 0), v5(3, -4, 0), {0, 0, 1}, false},
            {v5(0, 4, -3), v5(0, 3, 4), {1, 0, 0}, false},
            {v5(0, -4, -3), v5(0, 3, -4), {1, 0, 0}, false},
            {v5(-3, 0, 4), v5(4, 0, 3), {0, 1, 0}, false},
            {v5(3, 0, 4), v5(-4, 0, 3), {0, -1, 0}, false},
        };
        validate_frames();
        build_frame_matrix();
        measure_ball();
    }

    // Coefficients c_k with sum_k c_k kb_k (x) kb_k = R (R symmetric).
    std::array<double, 6> weights(const Sym3& r) const {
        return detail::solve6(frame_matrix,
                              {r.s[0], r.s[1], r.s[2], r.s[3], r.s[4], r.s[5]});
    }

    // a_{v,k}(R) = sqrt(c_k(R)); rejects R outside the admissible ball.
    std::array<double, 6> coefficients(const Sym3& r, bool enforce_ball = true) const {
        Sym3 dev = r;
        dev.s[0] -= 1.0;
        dev.s[1] -= 1.0;
        dev.s[2] -= 1.0;
        if (enforce_ball)
            require(dev.frobenius() <= eps_v, "geometric_coeffs: R outside the eps_v ball");
        auto c = weights(r);
        std::array<double, 6> a{};
        for (int i = 0; i < 6; ++i) {
            require(c[i] > 0.0, "geometric_coeffs: nonpositive weight (margin exhausted)");
            a[i] = std::sqrt(c[i]);
        }
        return a;
    }

  private:
    void validate_frames() {
        auto check_unit_frame = [&](const Direction& d) {
            require(std::abs(norm(d.k) - 1) < 1e-14 && std::abs(norm(d.kb) - 1) < 1e-14
                        && std::abs(norm(d.kbb) - 1) < 1e-14,
                    "DirectionSet: frame vectors must be unit");
            require(std::abs(dot(d.k, d.kb)) < 1e-14 && std::abs(dot(d.k, d.kbb)) < 1e-14
                        && std::abs(dot(d.kb, d.kbb)) < 1e-14,
                    "DirectionSet: frame must be orthogonal");
            for (const Vec3& v : {d.k, d.kb, d.kbb}) {
                for (int i = 0; i < 3; ++i) {
                    const double w = v[i] * n_lambda;
                    require(std::abs(w - std::round(w)) < 1e-12,
                            "DirectionSet: N_Lambda frame must be integer");
                }
            }
        };
        for (const auto& d : theta_dirs) check_unit_frame(d);
        for (const auto& d : v_dirs) check_unit_frame(d);
        // Lambda_theta and Lambda_v are disjoint by construction (axis vs 3-4-5).
        for (const auto& t : theta_dirs)
            for (const auto& v : v_dirs)
                require(norm(t.k - v.k) > 1e-12, "DirectionSet: Lambda_theta meets Lambda_v");
    }

    void build_frame_matrix() {
        for (int k = 0; k < 6; ++k) {
            const auto col = detail::sym_components(outer(v_dirs[k].kb, v_dirs[k].kb));
            for (int r = 0; r < 6; ++r) frame_matrix[r][k] = col[r];
        }
        // Spanning check: solving for the identity must succeed and reproduce it.
        const auto c = weights(Sym3{{1, 1, 1, 0, 0, 0}});
        Mat3 recon{};
        for (int k = 0; k < 6; ++k) recon = recon + outer(v_dirs[k].kb, v_dirs[k].kb) * c[k];
        require((recon - Mat3::identity()).max_abs() < 1e-12,
                "DirectionSet: kb (x) kb do not span the symmetric matrices");
    }

    void measure_ball() {
        const auto c0 = weights(Sym3{{1, 1, 1, 0, 0, 0}});
        double c_min = c0[0];
        for (double c : c0) {
            require(c > 0, "DirectionSet: identity weights must be positive");
            c_min = std::min(c_min, c);
        }
        // Largest weight change per unit Frobenius perturbation, sampled.
        std::mt19937_64 rng(2024);
        std::normal_distribution<double> gauss;
        double worst_slope = 0;
        for (int trial = 0; trial < 400; ++trial) {
            Sym3 d;
            for (auto& x : d.s) x = gauss(rng);
            const double fr = d.frobenius();
            for (auto& x : d.s) x /= fr;
            const auto c = weights(d);
            for (double x : c) worst_slope = std::max(worst_slope, std::abs(x));
        }
        eps_v = 0.5 * c_min / worst_slope;

        // Measured M: sup over the admissible ball of the coefficients and a
        // finite-difference first derivative.
        double m = 0;
        for (int trial = 0; trial < 400; ++trial) {
            Sym3 r{{1, 1, 1, 0, 0, 0}};
            Sym3 d;
            for (auto& x : d.s) x = gauss(rng);
            const double fr = d.frobenius();
            const double rad = eps_v * (trial % 20) / 20.0;
            for (int i = 0; i < 6; ++i) r.s[i] += d.s[i] / fr * rad;
            const auto a = coefficients(r, false);
            for (double x : a) m = std::max(m, x);
            const double h = 1e-6;
            Sym3 rp = r;
            rp.s[3] += h;
            const auto ap = coefficients(rp, false);
            for (int i = 0; i < 6; ++i) m = std::max(m, std::abs(ap[i] - a[i]) / h);
        }
        measured_M = m;
    }
};

inline const DirectionSet& direction_set() {
    static const DirectionSet ds;
    return ds;
}

}  // namespace torusflux
