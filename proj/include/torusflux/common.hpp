#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace torusflux {

using cplx = std::complex<double>;

inline constexpr double two_pi = 6.283185307179586476925286766559;

struct Vec3 {
    double x = 0, y = 0, z = 0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

// Row-major 3x3 matrix, used pointwise (flow-map Jacobians, frames).
struct Mat3 {
    std::array<double, 9> m{};  // m[3*r + c]

    double& operator()(int r, int c) { return m[3 * r + c]; }
    double operator()(int r, int c) const { return m[3 * r + c]; }

    static Mat3 identity() {
        Mat3 I;
        I(0, 0) = I(1, 1) = I(2, 2) = 1.0;
        return I;
    }

    Mat3 operator+(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] + o.m[i];
        return r;
    }
    Mat3 operator-(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] - o.m[i];
        return r;
    }
    Mat3 operator*(double s) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] * s;
        return r;
    }

    Vec3 operator*(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }

    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
        return r;
    }

    double det() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7])
             - m[1] * (m[3] * m[8] - m[5] * m[6])
             + m[2] * (m[3] * m[7] - m[4] * m[6]);
    }

    Mat3 inverse() const {
        const double d = det();
        Mat3 r;
        r(0, 0) = (m[4] * m[8] - m[5] * m[7]) / d;
        r(0, 1) = (m[2] * m[7] - m[1] * m[8]) / d;
        r(0, 2) = (m[1] * m[5] - m[2] * m[4]) / d;
        r(1, 0) = (m[5] * m[6] - m[3] * m[8]) / d;
        r(1, 1) = (m[0] * m[8] - m[2] * m[6]) / d;
        r(1, 2) = (m[2] * m[3] - m[0] * m[5]) / d;
        r(2, 0) = (m[3] * m[7] - m[4] * m[6]) / d;
        r(2, 1) = (m[1] * m[6] - m[0] * m[7]) / d;
        r(2, 2) = (m[0] * m[4] - m[1] * m[3]) / d;
        return r;
    }

    double max_abs() const {
        double r = 0;
        for (double v : m) r = std::max(r, std::abs(v));
        return r;
    }
};

inline Mat3 outer(const Vec3& a, const Vec3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = a[i] * b[j];
    return r;
}

// Symmetric 3x3, stored as (xx, yy, zz, xy, xz, yz).
struct Sym3 {
    std::array<double, 6> s{};

    static constexpr int idx(int r, int c) {
        if (r == c) return r;
        int lo = std::min(r, c), hi = std::max(r, c);
        return lo == 0 ? (hi == 1 ? 3 : 4) : 5;
    }
    double operator()(int r, int c) const { return s[idx(r, c)]; }
    double& at(int r, int c) { return s[idx(r, c)]; }

    double trace() const { return s[0] + s[1] + s[2]; }

    Mat3 full() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(i, j);
        return r;
    }

    static Sym3 from_full_symmetric(const Mat3& a) {
        Sym3 r;
        r.s = {a(0, 0), a(1, 1), a(2, 2),
               0.5 * (a(0, 1) + a(1, 0)), 0.5 * (a(0, 2) + a(2, 0)), 0.5 * (a(1, 2) + a(2, 1))};
        return r;
    }

    Sym3 operator-(const Sym3& o) const {
        Sym3 r;
        for (int i = 0; i < 6; ++i) r.s[i] = s[i] - o.s[i];
        return r;
    }

    double frobenius() const {
        return std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]
                         + 2 * (s[3] * s[3] + s[4] * s[4] + s[5] * s[5]));
    }
};

[[noreturn]] inline void fail(const std::string& msg) { throw std::runtime_error(msg); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
}

}  // namespace torusflux
