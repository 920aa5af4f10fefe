#pragma once

#include <vector>

#include "torusflux/ops.hpp"

namespace torusflux {

// The standard bump exp(-1/(1-t^2)) on (-1,1), zero outside.
inline double bump(double t) {
    const double t2 = t * t;
    return t2 >= 1.0 ? 0.0 : std::exp(-1.0 / (1.0 - t2));
}

namespace detail {

// High-resolution trapezoid on [-1,1]; spectrally accurate for smooth
// compactly supported integrands.
template <class Fn>
inline double integrate_unit(Fn&& f, int nodes = 8192) {
    double s = 0.0;
    const double h = 2.0 / nodes;
    for (int i = 0; i <= nodes; ++i) {
        const double w = (i == 0 || i == nodes) ? 0.5 : 1.0;
        s += w * f(-1.0 + i * h);
    }
    return s * h;
}

}  // namespace detail

// Normalized even bump mollifier, kind space (3-D radial) or time (1-D).
struct Mollifier {
    enum class Kind { space, time };
    Kind kind = Kind::space;
    double width = 1.0;  // support radius (epsilon or ell_q)

    static Mollifier space(double ell) { return {Kind::space, ell}; }
    static Mollifier time(double eps) { return {Kind::time, eps}; }

    // Unit-mass normalization constants.
    double mass_1d() const {
        static const double m = detail::integrate_unit([](double t) { return bump(t); });
        return m;
    }
    double mass_3d() const {
        static const double m = detail::integrate_unit([](double r) {
            return r <= 0 ? 0.0 : 2.0 * two_pi * r * r * bump(r);
        });
        return m;
    }

    // phi_eps(t) for the time kind.
    double eval_time(double t) const {
        return bump(t / width) / (mass_1d() * width);
    }

    // psi_ell(x) for the space kind, radial.
    double eval_space(double r) const {
        return bump(r / width) / (mass_3d() * width * width * width);
    }

    // Fourier transform of the unit-width radial profile at radial frequency
    // kappa (cycles), normalized to 1 at kappa = 0.
    static double radial_hat(double kappa) {
        if (kappa == 0.0) return 1.0;
        const double denom = detail::integrate_unit(
            [](double r) { return r <= 0 ? 0.0 : r * r * bump(r); });
        const double num = detail::integrate_unit([kappa](double r) {
            if (r <= 0) return 0.0;
            const double arg = two_pi * kappa * r;
            return r * r * bump(r) * std::sin(arg) / arg;
        });
        return num / denom;
    }
};

// Spatial mollification as a spectral multiplier: exact convolution with
// psi_ell for band-limited fields, unit mass by construction.
inline ScalarField mollify_space(const ScalarField& f, double ell) {
    require(ell >= 2.0 * f.grid.spacing(),
            "mollify_space: width below the resolution floor (need ell >= 2h)");
    Spectrum s = to_spectrum(f);
    // Table of radial-hat values over the |k| ell range, linearly interpolated.
    const int km = f.grid.n / 2;
    std::vector<double> table;
    const int samples = 2048;
    const double kappa_max = ell * std::sqrt(3.0) * km + 1e-9;
    table.resize(samples + 1);
    for (int i = 0; i <= samples; ++i)
        table[i] = Mollifier::radial_hat(kappa_max * i / samples);
    auto hat = [&](double kappa) {
        const double u = kappa / kappa_max * samples;
        const int i0 = std::min(int(u), samples - 1);
        const double w = u - i0;
        return (1.0 - w) * table[i0] + w * table[i0 + 1];
    };
    for_each_mode(f.grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const double kk = std::sqrt(double(kx) * kx + double(ky) * ky + double(kz) * kz);
        s[idx] *= hat(ell * kk);
    });
    return from_spectrum(f.grid, s);
}

inline VectorField mollify_space(const VectorField& u, double ell) {
    VectorField out(u.grid);
    for (int i = 0; i < 3; ++i) out[i] = mollify_space(u[i], ell);
    return out;
}

inline SymMatrixField mollify_space(const SymMatrixField& r, double ell) {
    SymMatrixField out(r.grid);
    out.trace_free = r.trace_free;
    for (int i = 0; i < 6; ++i) out[i] = mollify_space(r[i], ell);
    return out;
}

}  // namespace torusflux
