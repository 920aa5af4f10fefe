#pragma once

#include <cstddef>
#include <cstdint>

#include "torusflux/common.hpp"

namespace torusflux {

// Uniform collocation grid on [0,1)^3 with the 2/3-rule dealias cutoff.
// Retained wavenumbers are |k_axis| <= kmax() per axis; the Nyquist mode
// (n/2, unpaired under negation) is always dropped.
struct TorusGrid {
    int n = 0;                      // points per axis, even
    double dealias_fraction = 2.0 / 3.0;

    TorusGrid() = default;
    explicit TorusGrid(int n_per_axis, double frac = 2.0 / 3.0)
        : n(n_per_axis), dealias_fraction(frac) {
        require(n > 0 && n % 2 == 0, "TorusGrid: n_per_axis must be positive and even");
        require(frac > 0.0 && frac <= 1.0, "TorusGrid: dealias_fraction in (0,1]");
    }

    bool operator==(const TorusGrid& o) const {
        return n == o.n && dealias_fraction == o.dealias_fraction;
    }

    std::size_t points() const { return std::size_t(n) * n * n; }
    double spacing() const { return 1.0 / n; }

    // Largest retained wavenumber per axis.
    int kmax() const {
        int k = int(dealias_fraction * n / 2.0 + 1e-12);
        if (k >= n / 2) k = n / 2 - 1;  // keep the set symmetric under negation
        return k;
    }

    // Signed wavenumber of FFT index i along one axis.
    int wavenumber(int i) const { return i <= n / 2 ? i : i - n; }

    std::size_t index(int ix, int iy, int iz) const {
        return (std::size_t(ix) * n + iy) * n + iz;
    }

    Vec3 point(int ix, int iy, int iz) const {
        const double h = spacing();
        return {ix * h, iy * h, iz * h};
    }
};

}  // namespace torusflux
