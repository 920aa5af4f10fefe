#pragma once

#include <array>

#include "torusflux/field.hpp"

namespace torusflux {

inline constexpr int kMaxDerivativeOrder = 6;

// Exact Fourier-multiplier derivative d^sigma f of the band-limited representative.
inline ScalarField derivative(const ScalarField& f, const std::array<int, 3>& sigma) {
    const int order = sigma[0] + sigma[1] + sigma[2];
    require(sigma[0] >= 0 && sigma[1] >= 0 && sigma[2] >= 0, "derivative: negative multi-index");
    require(order <= kMaxDerivativeOrder, "derivative: multi-index order exceeds maximum");
    Spectrum s = to_spectrum(f);
    for_each_mode(f.grid, [&](std::size_t idx, int kx, int ky, int kz) {
        cplx m(1.0, 0.0);
        const cplx ix(0.0, two_pi * kx), iy(0.0, two_pi * ky), iz(0.0, two_pi * kz);
        for (int a = 0; a < sigma[0]; ++a) m *= ix;
        for (int a = 0; a < sigma[1]; ++a) m *= iy;
        for (int a = 0; a < sigma[2]; ++a) m *= iz;
        s[idx] *= m;
    });
    return from_spectrum(f.grid, s);
}

inline ScalarField partial(const ScalarField& f, int axis) {
    std::array<int, 3> sigma{0, 0, 0};
    sigma[axis] = 1;
    return derivative(f, sigma);
}

inline VectorField gradient(const ScalarField& f) {
    VectorField g(f.grid);
    Spectrum s = to_spectrum(f);
    for (int axis = 0; axis < 3; ++axis) {
        Spectrum d(s.size());
        for_each_mode(f.grid, [&](std::size_t idx, int kx, int ky, int kz) {
            const int k[3] = {kx, ky, kz};
            d[idx] = s[idx] * cplx(0.0, two_pi * k[axis]);
        });
        g[axis] = from_spectrum(f.grid, d);
    }
    return g;
}

inline ScalarField divergence(const VectorField& u) {
    Spectrum out(Fft::get(u.grid.n).n_complex(), cplx(0.0));
    for (int axis = 0; axis < 3; ++axis) {
        Spectrum s = to_spectrum(u[axis]);
        for_each_mode(u.grid, [&](std::size_t idx, int kx, int ky, int kz) {
            const int k[3] = {kx, ky, kz};
            out[idx] += s[idx] * cplx(0.0, two_pi * k[axis]);
        });
    }
    return from_spectrum(u.grid, out);
}

inline VectorField curl(const VectorField& u) {
    std::array<Spectrum, 3> s{to_spectrum(u[0]), to_spectrum(u[1]), to_spectrum(u[2])};
    VectorField w(u.grid);
    std::array<Spectrum, 3> o;
    for (auto& x : o) x.assign(s[0].size(), cplx(0.0));
    for_each_mode(u.grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const cplx dx(0.0, two_pi * kx), dy(0.0, two_pi * ky), dz(0.0, two_pi * kz);
        o[0][idx] = dy * s[2][idx] - dz * s[1][idx];
        o[1][idx] = dz * s[0][idx] - dx * s[2][idx];
        o[2][idx] = dx * s[1][idx] - dy * s[0][idx];
    });
    for (int i = 0; i < 3; ++i) w[i] = from_spectrum(u.grid, o[i]);
    return w;
}

// (div R)_j = sum_m d_m R_jm for the six-component symmetric storage.
inline VectorField divergence(const SymMatrixField& r) {
    VectorField out(r.grid);
    std::array<Spectrum, 6> s;
    for (int i = 0; i < 6; ++i) s[i] = to_spectrum(r[i]);
    std::array<Spectrum, 3> o;
    for (auto& x : o) x.assign(s[0].size(), cplx(0.0));
    for_each_mode(r.grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const cplx d[3] = {{0.0, two_pi * kx}, {0.0, two_pi * ky}, {0.0, two_pi * kz}};
        for (int j = 0; j < 3; ++j)
            for (int m = 0; m < 3; ++m) o[j][idx] += d[m] * s[Sym3::idx(j, m)][idx];
    });
    for (int i = 0; i < 3; ++i) out[i] = from_spectrum(r.grid, o[i]);
    return out;
}

// Orthogonal projection onto divergence-free fields; the mean mode passes through.
inline VectorField leray_project(const VectorField& u) {
    std::array<Spectrum, 3> s{to_spectrum(u[0]), to_spectrum(u[1]), to_spectrum(u[2])};
    for_each_mode(u.grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
        if (k2 == 0.0) return;
        const cplx kd = (double(kx) * s[0][idx] + double(ky) * s[1][idx] + double(kz) * s[2][idx]) / k2;
        s[0][idx] -= double(kx) * kd;
        s[1][idx] -= double(ky) * kd;
        s[2][idx] -= double(kz) * kd;
    });
    VectorField out(u.grid);
    for (int i = 0; i < 3; ++i) out[i] = from_spectrum(u.grid, s[i]);
    return out;
}

// Matrix-valued right inverse of the divergence: output is symmetric and
// trace-free, and div(out) = u - mean(u). The k=0 mode is dropped.
inline SymMatrixField inverse_div_R(const VectorField& u) {
    std::array<Spectrum, 3> s{to_spectrum(u[0]), to_spectrum(u[1]), to_spectrum(u[2])};
    std::array<Spectrum, 6> o;
    for (auto& x : o) x.assign(s[0].size(), cplx(0.0));
    for_each_mode(u.grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const double xi[3] = {two_pi * kx, two_pi * ky, two_pi * kz};
        const double xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if (xi2 == 0.0) return;
        const cplx uh[3] = {s[0][idx], s[1][idx], s[2][idx]};
        const cplx p = xi[0] * uh[0] + xi[1] * uh[1] + xi[2] * uh[2];
        const cplx I(0.0, 1.0);
        for (int j = 0; j < 3; ++j)
            for (int m = j; m < 3; ++m) {
                cplx val = -I * (xi[m] * uh[j] + xi[j] * uh[m]) / xi2
                           + 0.5 * I * xi[j] * xi[m] * p / (xi2 * xi2);
                if (j == m) val += 0.5 * I * p / xi2;
                o[Sym3::idx(j, m)][idx] = val;
            }
    });
    SymMatrixField out(u.grid);
    out.trace_free = true;
    for (int i = 0; i < 6; ++i) out[i] = from_spectrum(u.grid, o[i]);
    return out;
}

// Vector-valued right inverse of the divergence: grad(Delta^{-1}(f - mean f)).
inline VectorField inverse_div_Rvex(const ScalarField& f) {
    Spectrum s = to_spectrum(f);
    std::array<Spectrum, 3> o;
    for (auto& x : o) x.assign(s.size(), cplx(0.0));
    for_each_mode(f.grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const double xi[3] = {two_pi * kx, two_pi * ky, two_pi * kz};
        const double xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if (xi2 == 0.0) return;
        for (int j = 0; j < 3; ++j) o[j][idx] = cplx(0.0, -xi[j] / xi2) * s[idx];
    });
    VectorField out(f.grid);
    for (int i = 0; i < 3; ++i) out[i] = from_spectrum(f.grid, o[i]);
    return out;
}

// Delta^{-1} with the mean mode zeroed.
inline ScalarField inverse_laplacian(const ScalarField& f) {
    Spectrum s = to_spectrum(f);
    for_each_mode(f.grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const double xi2 = two_pi * two_pi * (double(kx) * kx + double(ky) * ky + double(kz) * kz);
        s[idx] = xi2 == 0.0 ? cplx(0.0) : -s[idx] / xi2;
    });
    return from_spectrum(f.grid, s);
}

// Pointwise product with the 2/3-rule projection applied afterwards.
inline ScalarField multiply_dealiased(const ScalarField& a, const ScalarField& b) {
    ScalarField p(a.grid);
#pragma omp parallel for
    for (std::size_t i = 0; i < p.v.size(); ++i) p.v[i] = a.v[i] * b.v[i];
    return project_band(p);
}

inline VectorField multiply_dealiased(const VectorField& a, const ScalarField& b) {
    VectorField out(a.grid);
    for (int i = 0; i < 3; ++i) out[i] = multiply_dealiased(a[i], b);
    return out;
}

// v (x) u - (v.u)/3 Id, dealiased; the paper's trace-free tensor product.
inline SymMatrixField outer_trace_free(const VectorField& v, const VectorField& u) {
    SymMatrixField out(v.grid);
    out.trace_free = true;
    ScalarField tr(v.grid);
#pragma omp parallel for
    for (std::size_t i = 0; i < tr.v.size(); ++i)
        tr.v[i] = (v[0][i] * u[0][i] + v[1][i] * u[1][i] + v[2][i] * u[2][i]) / 3.0;
    for (int j = 0; j < 3; ++j)
        for (int m = j; m < 3; ++m) {
            ScalarField c(v.grid);
#pragma omp parallel for
            for (std::size_t i = 0; i < c.v.size(); ++i) {
                c.v[i] = 0.5 * (v[j][i] * u[m][i] + v[m][i] * u[j][i]);
                if (j == m) c.v[i] -= tr.v[i];
            }
            out[Sym3::idx(j, m)] = project_band(c);
        }
    return out;
}

// Full symmetric outer product (with trace), dealiased.
inline SymMatrixField outer_sym(const VectorField& v, const VectorField& u) {
    SymMatrixField out(v.grid);
    for (int j = 0; j < 3; ++j)
        for (int m = j; m < 3; ++m) {
            ScalarField c(v.grid);
#pragma omp parallel for
            for (std::size_t i = 0; i < c.v.size(); ++i)
                c.v[i] = 0.5 * (v[j][i] * u[m][i] + v[m][i] * u[j][i]);
            out[Sym3::idx(j, m)] = project_band(c);
        }
    return out;
}

// (u . grad) f, dealiased.
inline ScalarField advect(const VectorField& u, const ScalarField& f) {
    VectorField g = gradient(f);
    ScalarField out(f.grid);
#pragma omp parallel for
    for (std::size_t i = 0; i < out.v.size(); ++i)
        out.v[i] = u[0][i] * g[0][i] + u[1][i] * g[1][i] + u[2][i] * g[2][i];
    return project_band(out);
}

inline VectorField advect(const VectorField& u, const VectorField& w) {
    VectorField out(w.grid);
    for (int i = 0; i < 3; ++i) out[i] = advect(u, w[i]);
    return out;
}

}  // namespace torusflux
