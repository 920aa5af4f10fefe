#pragma once

#include <random>

#include "torusflux/holder.hpp"
#include "torusflux/ops.hpp"

namespace torusflux {

// Seeded band-limited random scalar: independent Gaussian modes for |k| <= k_cut
// with amplitude |k|^{-decay}, Hermitian-symmetrized through the inverse FFT.
// Deterministic for a fixed (grid, seed, k_cut, decay).
inline ScalarField random_scalar(const TorusGrid& g, std::uint64_t seed, int k_cut,
                                 double decay = 2.0, bool mean_free = true) {
    require(k_cut <= g.kmax(), "random_scalar: k_cut beyond the dealias cube");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Spectrum s(Fft::get(g.n).n_complex(), cplx(0.0));
    const int nzh = g.n / 2 + 1;
    // Serial fill in a fixed order keeps the field reproducible.
    for (int ix = 0; ix < g.n; ++ix)
        for (int iy = 0; iy < g.n; ++iy)
            for (int iz = 0; iz < nzh; ++iz) {
                const int kx = g.wavenumber(ix), ky = g.wavenumber(iy), kz = iz;
                const double kk = std::sqrt(double(kx) * kx + double(ky) * ky + double(kz) * kz);
                if (kk > k_cut) continue;
                if (kx == 0 && ky == 0 && kz == 0) continue;
                const double amp = std::pow(std::max(kk, 1.0), -decay);
                s[(std::size_t(ix) * g.n + iy) * nzh + iz] = amp * cplx(gauss(rng), gauss(rng));
            }
    ScalarField f = from_spectrum(g, s);
    // Round-trip enforces exact Hermitian symmetry of the stored samples.
    f = project_band(f);
    if (!mean_free) return f;
    const double mu = mean(f);
    for (auto& x : f.v) x -= mu;
    return f;
}

inline VectorField random_vector(const TorusGrid& g, std::uint64_t seed, int k_cut,
                                 double decay = 2.0) {
    VectorField u(g);
    for (int i = 0; i < 3; ++i) u[i] = random_scalar(g, seed * 3 + i + 1, k_cut, decay);
    return u;
}

inline VectorField random_divfree(const TorusGrid& g, std::uint64_t seed, int k_cut,
                                  double decay = 2.0) {
    return leray_project(random_vector(g, seed, k_cut, decay));
}

// Rescale so that the C^1 norm hits the requested value.
inline VectorField random_divfree_c1(const TorusGrid& g, std::uint64_t seed, int k_cut,
                                     double c1_norm) {
    VectorField u = random_divfree(g, seed, k_cut);
    const double h = holder_norm(u, 1, 0.0);
    return u * (c1_norm / h);
}

// Synthetic lacunary field of Hoelder index beta: sum of cosines at dyadic
// frequencies 2^j along x1 with amplitude 2^{-j beta}, extended trivially to 3-D.
inline ScalarField lacunary_field(const TorusGrid& g, double beta, int j_lo = 0,
                                  int j_hi = -1) {
    if (j_hi < 0) j_hi = int(std::floor(std::log2(double(g.kmax()))));
    return make_field(g, [&](Vec3 x) {
        double s = 0;
        for (int j = j_lo; j <= j_hi; ++j)
            s += std::exp2(-j * beta) * std::cos(two_pi * std::exp2(j) * x.x);
        return s;
    });
}

}  // namespace torusflux
