#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "torusflux/fft.hpp"
#include "torusflux/grid.hpp"

namespace torusflux {

using Spectrum = std::vector<cplx>;  // Hermitian half-space, kz in [0, n/2]

struct ScalarField {
    TorusGrid grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const TorusGrid& g, double fill = 0.0) : grid(g), v(g.points(), fill) {}

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    double& at(int ix, int iy, int iz) { return v[grid.index(ix, iy, iz)]; }
    double at(int ix, int iy, int iz) const { return v[grid.index(ix, iy, iz)]; }

    ScalarField& operator+=(const ScalarField& o) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
        return *this;
    }
    ScalarField& operator*=(double s) {
        for (auto& x : v) x *= s;
        return *this;
    }

    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(ScalarField a, double s) { return a *= s; }
    friend ScalarField operator*(double s, ScalarField a) { return a *= s; }
};

// Fill from a pointwise function of position.
inline ScalarField make_field(const TorusGrid& g, const std::function<double(Vec3)>& f) {
    ScalarField out(g);
    const int n = g.n;
#pragma omp parallel for collapse(2)
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) out.at(ix, iy, iz) = f(g.point(ix, iy, iz));
    return out;
}

inline double mean(const ScalarField& f) {
    double s = 0;
#pragma omp parallel for reduction(+ : s)
    for (std::size_t i = 0; i < f.v.size(); ++i) s += f.v[i];
    return s / double(f.v.size());
}

inline double sup_norm(const ScalarField& f) {
    double m = 0;
#pragma omp parallel for reduction(max : m)
    for (std::size_t i = 0; i < f.v.size(); ++i) m = std::max(m, std::abs(f.v[i]));
    return m;
}

// L^p by the uniform-grid quadrature (exact mean of the sampled integrand).
inline double lp_norm(const ScalarField& f, double p) {
    if (std::isinf(p)) return sup_norm(f);
    double s = 0;
#pragma omp parallel for reduction(+ : s)
    for (std::size_t i = 0; i < f.v.size(); ++i) s += std::pow(std::abs(f.v[i]), p);
    return std::pow(s / double(f.v.size()), 1.0 / p);
}

inline double l2_norm(const ScalarField& f) {
    double s = 0;
#pragma omp parallel for reduction(+ : s)
    for (std::size_t i = 0; i < f.v.size(); ++i) s += f.v[i] * f.v[i];
    return std::sqrt(s / double(f.v.size()));
}

inline Spectrum to_spectrum(const ScalarField& f) {
    Spectrum s(Fft::get(f.grid.n).n_complex());
    Fft::get(f.grid.n).forward(f.v.data(), s.data());
    return s;
}

inline ScalarField from_spectrum(const TorusGrid& g, const Spectrum& s) {
    ScalarField f(g);
    Fft::get(g.n).backward(s.data(), f.v.data());
    return f;
}

// Iterate the Hermitian half-spectrum; fn(index, kx, ky, kz).
template <class Fn>
inline void for_each_mode(const TorusGrid& g, Fn&& fn) {
    const int n = g.n, nzh = g.n / 2 + 1;
#pragma omp parallel for collapse(2)
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy) {
            const int kx = g.wavenumber(ix), ky = g.wavenumber(iy);
            std::size_t base = (std::size_t(ix) * n + iy) * nzh;
            for (int kz = 0; kz < nzh; ++kz) fn(base + kz, kx, ky, kz);
        }
}

// Zero every mode outside the retained cube (2/3 rule, Nyquist dropped).
inline void dealias(Spectrum& s, const TorusGrid& g) {
    const int km = g.kmax();
    for_each_mode(g, [&](std::size_t idx, int kx, int ky, int kz) {
        if (std::abs(kx) > km || std::abs(ky) > km || std::abs(kz) > km) s[idx] = 0.0;
    });
}

inline ScalarField project_band(const ScalarField& f) {
    Spectrum s = to_spectrum(f);
    dealias(s, f.grid);
    return from_spectrum(f.grid, s);
}

// Trigonometric interpolation onto a factor-times finer grid (zero padding);
// exact for band-limited fields.
inline ScalarField upsample(const ScalarField& f, int factor) {
    if (factor <= 1) return f;
    const TorusGrid fine(f.grid.n * factor, f.grid.dealias_fraction);
    Spectrum coarse = to_spectrum(f);
    Spectrum s(Fft::get(fine.n).n_complex(), cplx(0.0));
    const int n = f.grid.n, nzh = n / 2 + 1, fzh = fine.n / 2 + 1;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < nzh; ++iz) {
                const int kx = f.grid.wavenumber(ix), ky = f.grid.wavenumber(iy);
                const int jx = kx >= 0 ? kx : kx + fine.n;
                const int jy = ky >= 0 ? ky : ky + fine.n;
                s[(std::size_t(jx) * fine.n + jy) * fzh + iz] =
                    coarse[(std::size_t(ix) * n + iy) * nzh + iz];
            }
    return from_spectrum(fine, s);
}

// Grid max / L^p quadrature on a spectrally refined grid; reduces the
// sampling error of extrema of band-limited fields.
inline double sup_norm_refined(const ScalarField& f, int factor = 8) {
    return sup_norm(upsample(f, factor));
}

inline double lp_norm_refined(const ScalarField& f, double p, int factor = 4) {
    return lp_norm(upsample(f, factor), p);
}

// Continuum sup norm of a band-limited field: refined grid search followed by
// Newton polishing on the exact trigonometric interpolant.
inline double sup_norm_polished(const ScalarField& f, int factor = 4, int candidates = 8) {
    // Mode list (full lattice from the Hermitian half-space).
    struct Mode {
        double kx, ky, kz;
        cplx a;
    };
    std::vector<Mode> modes;
    {
        Spectrum s = to_spectrum(f);
        const int n = f.grid.n, nzh = n / 2 + 1;
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy)
                for (int iz = 0; iz < nzh; ++iz) {
                    const cplx a = s[(std::size_t(ix) * n + iy) * nzh + iz];
                    if (std::abs(a) < 1e-16) continue;
                    modes.push_back({double(f.grid.wavenumber(ix)), double(f.grid.wavenumber(iy)),
                                     double(iz), a});
                }
    }
    auto eval = [&](const Vec3& x, Vec3* grad, Mat3* hess) {
        double val = 0;
        if (grad) *grad = Vec3{};
        if (hess) *hess = Mat3{};
        for (const auto& m : modes) {
            const double w = (m.kz == 0.0) ? 1.0 : 2.0;  // Hermitian partner weight
            const double ph = two_pi * (m.kx * x.x + m.ky * x.y + m.kz * x.z);
            const double c = std::cos(ph), sn = std::sin(ph);
            const double re = m.a.real(), im = m.a.imag();
            // real part of a e^{i ph} summed with the conjugate partner
            val += w * (re * c - im * sn);
            if (grad || hess) {
                const double d = -w * two_pi * (re * sn + im * c);
                const double dd = -w * two_pi * two_pi * (re * c - im * sn);
                const double k[3] = {m.kx, m.ky, m.kz};
                for (int i = 0; i < 3; ++i) {
                    if (grad) (*grad)[i] += d * k[i];
                    if (hess)
                        for (int j = 0; j < 3; ++j) (*hess)(i, j) += dd * k[i] * k[j];
                }
            }
        }
        return val;
    };

    // Candidate points: extrema of both signs on the refined grid.
    ScalarField fine = upsample(f, factor);
    const int nf = fine.grid.n;
    std::vector<std::pair<double, Vec3>> tops;
    for (int ix = 0; ix < nf; ++ix)
        for (int iy = 0; iy < nf; ++iy)
            for (int iz = 0; iz < nf; ++iz) {
                const double a = std::abs(fine.at(ix, iy, iz));
                if (int(tops.size()) < candidates) {
                    tops.push_back({a, fine.grid.point(ix, iy, iz)});
                    std::sort(tops.begin(), tops.end(),
                              [](auto& l, auto& r) { return l.first > r.first; });
                } else if (a > tops.back().first) {
                    tops.back() = {a, fine.grid.point(ix, iy, iz)};
                    std::sort(tops.begin(), tops.end(),
                              [](auto& l, auto& r) { return l.first > r.first; });
                }
            }

    double best = sup_norm(fine);
    const double step_cap = 0.75 / nf;
    for (auto& [val0, x0] : tops) {
        Vec3 x = x0;
        for (int it = 0; it < 12; ++it) {
            Vec3 g;
            Mat3 h;
            eval(x, &g, &h);
            if (std::abs(h.det()) < 1e-30) break;
            Vec3 step = h.inverse() * g;
            double len = norm(step);
            if (len > step_cap) step = step * (step_cap / len);
            x -= step;
            if (len < 1e-14) break;
        }
        best = std::max(best, std::abs(eval(x, nullptr, nullptr)));
    }
    return best;
}

struct VectorField {
    TorusGrid grid;
    std::array<ScalarField, 3> c;

    VectorField() = default;
    explicit VectorField(const TorusGrid& g) : grid(g), c{ScalarField(g), ScalarField(g), ScalarField(g)} {}

    ScalarField& operator[](int i) { return c[i]; }
    const ScalarField& operator[](int i) const { return c[i]; }

    Vec3 at(std::size_t i) const { return {c[0][i], c[1][i], c[2][i]}; }
    void set(std::size_t i, const Vec3& v) { c[0][i] = v.x; c[1][i] = v.y; c[2][i] = v.z; }

    VectorField& operator+=(const VectorField& o) {
        for (int i = 0; i < 3; ++i) c[i] += o.c[i];
        return *this;
    }
    VectorField& operator-=(const VectorField& o) {
        for (int i = 0; i < 3; ++i) c[i] -= o.c[i];
        return *this;
    }
    VectorField& operator*=(double s) {
        for (int i = 0; i < 3; ++i) c[i] *= s;
        return *this;
    }
    friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
    friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
    friend VectorField operator*(VectorField a, double s) { return a *= s; }
};

inline double sup_norm(const VectorField& u) {
    double m = 0;
    for (int i = 0; i < 3; ++i) m = std::max(m, sup_norm(u[i]));
    return m;
}

inline double l2_norm(const VectorField& u) {
    double s = 0;
    for (int i = 0; i < 3; ++i) {
        const double c = l2_norm(u[i]);
        s += c * c;
    }
    return std::sqrt(s);
}

inline Vec3 mean(const VectorField& u) { return {mean(u[0]), mean(u[1]), mean(u[2])}; }

// Symmetric 3x3 field stored as six scalar components (xx, yy, zz, xy, xz, yz).
struct SymMatrixField {
    TorusGrid grid;
    std::array<ScalarField, 6> c;
    bool trace_free = false;

    SymMatrixField() = default;
    explicit SymMatrixField(const TorusGrid& g)
        : grid(g), c{ScalarField(g), ScalarField(g), ScalarField(g),
                     ScalarField(g), ScalarField(g), ScalarField(g)} {}

    ScalarField& operator[](int i) { return c[i]; }
    const ScalarField& operator[](int i) const { return c[i]; }

    Sym3 at(std::size_t i) const {
        Sym3 s;
        for (int j = 0; j < 6; ++j) s.s[j] = c[j][i];
        return s;
    }
    void set(std::size_t i, const Sym3& s) {
        for (int j = 0; j < 6; ++j) c[j][i] = s.s[j];
    }

    SymMatrixField& operator+=(const SymMatrixField& o) {
        for (int i = 0; i < 6; ++i) c[i] += o.c[i];
        return *this;
    }
    SymMatrixField& operator-=(const SymMatrixField& o) {
        for (int i = 0; i < 6; ++i) c[i] -= o.c[i];
        return *this;
    }
    SymMatrixField& operator*=(double s) {
        for (int i = 0; i < 6; ++i) c[i] *= s;
        return *this;
    }
    friend SymMatrixField operator+(SymMatrixField a, const SymMatrixField& b) { return a += b; }
    friend SymMatrixField operator-(SymMatrixField a, const SymMatrixField& b) { return a -= b; }
    friend SymMatrixField operator*(SymMatrixField a, double s) { return a *= s; }
};

inline double sup_norm(const SymMatrixField& r) {
    double m = 0;
    for (int i = 0; i < 6; ++i) m = std::max(m, sup_norm(r[i]));
    return m;
}

// Largest pointwise |trace|.
inline double max_trace(const SymMatrixField& r) {
    double m = 0;
#pragma omp parallel for reduction(max : m)
    for (std::size_t i = 0; i < r[0].v.size(); ++i)
        m = std::max(m, std::abs(r[0][i] + r[1][i] + r[2][i]));
    return m;
}

}  // namespace torusflux
