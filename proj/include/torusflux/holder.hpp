#pragma once

#include <vector>

#include "torusflux/ops.hpp"

namespace torusflux {

namespace detail {

inline std::vector<std::array<int, 3>> multi_indices(int order) {
    std::vector<std::array<int, 3>> out;
    for (int a = 0; a <= order; ++a)
        for (int b = 0; b <= order - a; ++b) out.push_back({a, b, order - a - b});
    return out;
}

}  // namespace detail

// [f]_N = max over |sigma| = N of sup |d^sigma f|.
inline double holder_seminorm_int(const ScalarField& f, int order) {
    require(order <= kMaxDerivativeOrder, "holder: derivative order exceeds maximum");
    if (order == 0) return sup_norm(f);
    double m = 0;
    for (const auto& sigma : detail::multi_indices(order))
        m = std::max(m, sup_norm(derivative(f, sigma)));
    return m;
}

// Grid estimator of the alpha seminorm of the order-N derivatives: pairwise
// differences over a fixed direction/stride stencil within periodic distance
// <= 1/4. A lower bound of the continuum seminorm.
inline double holder_seminorm_frac(const ScalarField& f, int order, double alpha) {
    if (alpha <= 0.0) return 0.0;
    std::vector<ScalarField> ders;
    if (order == 0) {
        ders.push_back(f);
    } else {
        for (const auto& sigma : detail::multi_indices(order)) ders.push_back(derivative(f, sigma));
    }

    const int n = f.grid.n;
    static const int dirs[9][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, 0, 1},
                                   {0, 1, 1}, {1, -1, 0}, {1, 0, -1}, {0, 1, -1}};
    std::vector<int> strides;
    for (int s = 1; s <= n / 4; s *= 2) strides.push_back(s);
    for (int s = 3; s <= n / 4; s *= 2) strides.push_back(s);

    double best = 0;
    for (const auto& g : ders) {
        for (const auto d : dirs)
            for (int s : strides) {
                const Vec3 disp{double(d[0] * s) / n, double(d[1] * s) / n, double(d[2] * s) / n};
                const double dist = norm(disp);
                if (dist > 0.25 + 1e-12) continue;
                const double w = std::pow(dist, -alpha);
                double m = 0;
#pragma omp parallel for collapse(2) reduction(max : m)
                for (int ix = 0; ix < n; ++ix)
                    for (int iy = 0; iy < n; ++iy)
                        for (int iz = 0; iz < n; ++iz) {
                            const int jx = (ix + d[0] * s + 4 * n) % n;
                            const int jy = (iy + d[1] * s + 4 * n) % n;
                            const int jz = (iz + d[2] * s + 4 * n) % n;
                            m = std::max(m, std::abs(g.at(ix, iy, iz) - g.at(jx, jy, jz)));
                        }
                best = std::max(best, m * w);
            }
    }
    return best;
}

// ||f||_N = sum_{j<=N} [f]_j and ||f||_{N+alpha} = ||f||_N + [f]_{N+alpha}.
inline double holder_norm(const ScalarField& f, int order, double alpha) {
    require(order + 1 <= kMaxDerivativeOrder, "holder_norm: N+1 exceeds derivative maximum");
    require(alpha >= 0.0 && alpha < 1.0, "holder_norm: alpha in [0,1)");
    double out = 0;
    for (int j = 0; j <= order; ++j) out += holder_seminorm_int(f, j);
    if (alpha > 0.0) out += holder_seminorm_frac(f, order, alpha);
    return out;
}

inline double holder_norm(const VectorField& u, int order, double alpha) {
    double m = 0;
    for (int i = 0; i < 3; ++i) m = std::max(m, holder_norm(u[i], order, alpha));
    return m;
}

}  // namespace torusflux
