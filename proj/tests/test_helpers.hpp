#pragma once

#include <catch2/catch_amalgamated.hpp>

#include "torusflux/field.hpp"

namespace tfx_test {

using namespace torusflux;

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

inline double max_abs_diff(const VectorField& a, const VectorField& b) {
    double m = 0;
    for (int c = 0; c < 3; ++c) m = std::max(m, max_abs_diff(a[c], b[c]));
    return m;
}

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace tfx_test
