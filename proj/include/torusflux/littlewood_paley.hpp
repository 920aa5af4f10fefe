#pragma once

#include <vector>

#include "torusflux/field.hpp"
#include "torusflux/holder.hpp"

namespace torusflux {

namespace detail {

// C-infinity transition: 0 for t <= 0, 1 for t >= 1.
inline double smoothstep_inf(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

}  // namespace detail

// Radial dyadic cutoffs built from one ramp so that the partition of unity
// chi(xi) + sum_{j>=0} phi(2^{-j} xi) = 1 telescopes exactly:
//   theta ramps 0 -> 1 on [3/4, 6/7], chi = 1 - theta, phi(r) = theta(r) - theta(r/2).
// This hits chi == 1 on |xi| <= 3/4, supp chi within {|xi| <= 4/3},
// supp phi within {3/4 <= |xi| <= 8/3} and phi == 1 on [6/7, 3/2].
struct DyadicSystem {
    TorusGrid grid;
    int j_max = 0;       // largest block whose annulus is fully inside the dealias ball
    int j_usable = 0;    // largest block whose plateau still meets the resolved lattice

    explicit DyadicSystem(const TorusGrid& g) : grid(g) {
        const double radius = g.kmax();
        j_max = int(std::floor(std::log2(radius * 3.0 / 8.0)));
        j_usable = int(std::floor(std::log2(radius)));
    }

    static double theta(double r) {
        return detail::smoothstep_inf((r - 0.75) / (6.0 / 7.0 - 0.75));
    }
    static double chi(double r) { return 1.0 - theta(r); }
    static double phi(double r) { return theta(r) - theta(r / 2.0); }

    // Multiplier value of block j at radial frequency r (j = -1 is the low block).
    static double block(int j, double r) {
        return j < 0 ? chi(r) : phi(std::ldexp(r, -j));
    }
};

inline ScalarField delta_j(const DyadicSystem& lp, const ScalarField& f, int j,
                           bool* truncated = nullptr) {
    require(j >= -1, "delta_j: j >= -1");
    if (truncated) *truncated = j > lp.j_usable;
    if (j > lp.j_usable) return ScalarField(f.grid);  // annulus beyond the lattice
    Spectrum s = to_spectrum(f);
    for_each_mode(f.grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const double r = std::sqrt(double(kx) * kx + double(ky) * ky + double(kz) * kz);
        s[idx] *= DyadicSystem::block(j, r);
    });
    return from_spectrum(f.grid, s);
}

// Low-frequency cutoff S_Q: multiplier chi(2^{-Q} k), equal to sum_{j<Q} Delta_j.
inline ScalarField s_q(const ScalarField& f, int Q) {
    Spectrum s = to_spectrum(f);
    for_each_mode(f.grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const double r = std::sqrt(double(kx) * kx + double(ky) * ky + double(kz) * kz);
        s[idx] *= DyadicSystem::chi(std::ldexp(r, -Q));
    });
    return from_spectrum(f.grid, s);
}

inline VectorField s_q(const VectorField& u, int Q) {
    VectorField out(u.grid);
    for (int i = 0; i < 3; ++i) out[i] = s_q(u[i], Q);
    return out;
}

// d_{j,p}(u) = 2^{j/3} ||Delta_j u||_{L^p}, j = -1 .. j_usable.
struct BesovSeq {
    int j_lo = -1;
    std::vector<double> d;  // entry i corresponds to j = j_lo + i
    double p = 2.0;

    double at(int j) const {
        const int i = j - j_lo;
        return (i < 0 || i >= int(d.size())) ? 0.0 : d[i];
    }
    int j_hi() const { return j_lo + int(d.size()) - 1; }
};

inline BesovSeq besov_sequence(const DyadicSystem& lp, const ScalarField& f, double p) {
    BesovSeq seq;
    seq.p = p;
    for (int j = -1; j <= lp.j_usable; ++j)
        seq.d.push_back(std::exp2(j / 3.0) * lp_norm(delta_j(lp, f, j), p));
    return seq;
}

inline BesovSeq besov_sequence(const DyadicSystem& lp, const VectorField& u, double p) {
    BesovSeq seq;
    seq.p = p;
    for (int j = -1; j <= lp.j_usable; ++j) {
        std::array<ScalarField, 3> b{delta_j(lp, u[0], j), delta_j(lp, u[1], j),
                                     delta_j(lp, u[2], j)};
        ScalarField mag(u.grid);
#pragma omp parallel for
        for (std::size_t i = 0; i < mag.v.size(); ++i)
            mag.v[i] = std::sqrt(b[0][i] * b[0][i] + b[1][i] * b[1][i] + b[2][i] * b[2][i]);
        seq.d.push_back(std::exp2(j / 3.0) * lp_norm(mag, p));
    }
    return seq;
}

// Nonhomogeneous Besov norm: l^q over j of 2^{js} ||Delta_j f||_{L^p}. The low
// block enters unweighted, so constants have norm |c| for every s.
inline double besov_norm(const DyadicSystem& lp, const ScalarField& f, double s, double p,
                         double q) {
    require(p >= 1.0 && q >= 1.0, "besov_norm: exponents in [1,inf]");
    double acc = 0.0;
    for (int j = -1; j <= lp.j_usable; ++j) {
        const double term = std::exp2(std::max(j, 0) * s) * lp_norm(delta_j(lp, f, j), p);
        if (std::isinf(q))
            acc = std::max(acc, term);
        else
            acc += std::pow(term, q);
    }
    return std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
}

// K(j) = 2^{2j/3} for j <= 0 and 2^{-j/3} for j >= 1.
inline double k_kernel(int j) {
    return j <= 0 ? std::exp2(2.0 * j / 3.0) : std::exp2(-j / 3.0);
}

// (K * d)(Q) = sum_{j<=Q} 2^{(2/3)(j-Q)} d_j + sum_{j>Q} 2^{(1/3)(Q-j)} d_j.
inline double k_kernel_convolve(const BesovSeq& d, int Q) {
    double acc = 0.0;
    for (int j = d.j_lo; j <= d.j_hi(); ++j) acc += k_kernel(j - Q) * d.at(j);
    return acc;
}

// Measured Bernstein ratios for a field spectrally supported in lambda B or
// lambda C (ball / annulus membership verified first).
struct BernsteinReport {
    bool support_ok = false;
    double support_leak = 0.0;              // relative l2 mass outside the stated set
    std::array<double, 4> ratio_upper{};    // k = 0..3: sup|d^a f|_q / (lam^{k+3(1/p-1/q)} |f|_p)
    std::array<double, 4> ratio_lower{};    // annulus only: lam^k |f|_p / sup|d^a f|_p
};

inline BernsteinReport bernstein_check(const ScalarField& f, double lambda, bool annulus,
                                       double p, double q, double inner = 0.5,
                                       double outer = 3.0) {
    require(p <= q, "bernstein_check: requires p <= q");
    BernsteinReport rep;

    Spectrum s = to_spectrum(f);
    double inside = 0, outside = 0;
    for (int ix = 0; ix < f.grid.n; ++ix)
        for (int iy = 0; iy < f.grid.n; ++iy)
            for (int kz = 0; kz <= f.grid.n / 2; ++kz) {
                const int kx = f.grid.wavenumber(ix), ky = f.grid.wavenumber(iy);
                const std::size_t idx = (std::size_t(ix) * f.grid.n + iy) * (f.grid.n / 2 + 1) + kz;
                const double r = std::sqrt(double(kx) * kx + double(ky) * ky + double(kz) * kz);
                const double m = std::norm(s[idx]);
                const bool in = annulus ? (r >= inner * lambda && r <= outer * lambda)
                                        : (r <= lambda);
                (in ? inside : outside) += m;
            }
    rep.support_leak = outside / std::max(inside + outside, 1e-300);
    rep.support_ok = rep.support_leak < 1e-13;
    if (!rep.support_ok) return rep;

    const double fp = lp_norm(f, p);
    for (int k = 0; k <= 3; ++k) {
        double dq = 0, dp = 0;
        if (k == 0) {
            dq = lp_norm(f, q);
            dp = fp;
        } else {
            for (const auto& sigma : detail::multi_indices(k)) {
                const ScalarField g = derivative(f, sigma);
                dq = std::max(dq, lp_norm(g, q));
                dp = std::max(dp, lp_norm(g, p));
            }
        }
        const double growth = std::pow(lambda, k + 3.0 * (1.0 / p - (std::isinf(q) ? 0.0 : 1.0 / q)));
        rep.ratio_upper[k] = dq / (growth * fp);
        if (annulus) rep.ratio_lower[k] = std::pow(lambda, k) * fp / dp;
    }
    return rep;
}

}  // namespace torusflux
