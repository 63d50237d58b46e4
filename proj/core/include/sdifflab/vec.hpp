#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>

namespace sdifflab {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Point or tangent vector on the torus T^d, d <= 3. Unused slots stay zero.
struct Vec {
    int dim = 0;
    std::array<double, 3> c{0.0, 0.0, 0.0};

    Vec() = default;
    explicit Vec(int d) : dim(d) { assert(d >= 1 && d <= 3); }
    Vec(double x) : dim(1), c{x, 0.0, 0.0} {}
    Vec(double x, double y) : dim(2), c{x, y, 0.0} {}
    Vec(double x, double y, double z) : dim(3), c{x, y, z} {}

    double& operator[](int i) { return c[static_cast<size_t>(i)]; }
    double operator[](int i) const { return c[static_cast<size_t>(i)]; }

    Vec& operator+=(const Vec& o) {
        assert(dim == o.dim);
        for (int i = 0; i < dim; ++i) c[i] += o.c[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        assert(dim == o.dim);
        for (int i = 0; i < dim; ++i) c[i] -= o.c[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < dim; ++i) c[i] *= s;
        return *this;
    }
    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double s, Vec a) { return a *= s; }
    friend Vec operator*(Vec a, double s) { return a *= s; }

    double dot(const Vec& o) const {
        assert(dim == o.dim);
        double s = 0.0;
        for (int i = 0; i < dim; ++i) s += c[i] * o.c[i];
        return s;
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }

    /// Wrap every coordinate into [0, 2*pi).
    Vec wrapped() const {
        Vec r = *this;
        for (int i = 0; i < dim; ++i) {
            r.c[i] = std::fmod(r.c[i], kTwoPi);
            if (r.c[i] < 0.0) r.c[i] += kTwoPi;
        }
        return r;
    }
};

/// Small dense d x d matrix (Jacobians, basis certificates).
struct Mat {
    int dim = 0;
    std::array<std::array<double, 3>, 3> m{};

    Mat() = default;
    explicit Mat(int d) : dim(d) { assert(d >= 1 && d <= 3); }

    static Mat identity(int d) {
        Mat r(d);
        for (int i = 0; i < d; ++i) r.m[i][i] = 1.0;
        return r;
    }

    double& operator()(int i, int j) { return m[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
    double operator()(int i, int j) const { return m[static_cast<size_t>(i)][static_cast<size_t>(j)]; }

    Mat& operator+=(const Mat& o) {
        assert(dim == o.dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) m[i][j] += o.m[i][j];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        assert(dim == o.dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) m[i][j] -= o.m[i][j];
        return *this;
    }
    Mat& operator*=(double s) {
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) m[i][j] *= s;
        return *this;
    }
    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(double s, Mat a) { return a *= s; }

    friend Mat operator*(const Mat& a, const Mat& b) {
        assert(a.dim == b.dim);
        Mat r(a.dim);
        for (int i = 0; i < a.dim; ++i)
            for (int j = 0; j < a.dim; ++j) {
                double s = 0.0;
                for (int k = 0; k < a.dim; ++k) s += a.m[i][k] * b.m[k][j];
                r.m[i][j] = s;
            }
        return r;
    }

    Vec apply(const Vec& v) const {
        assert(dim == v.dim);
        Vec r(dim);
        for (int i = 0; i < dim; ++i) {
            double s = 0.0;
            for (int j = 0; j < dim; ++j) s += m[i][j] * v[j];
            r[i] = s;
        }
        return r;
    }

    double det() const {
        switch (dim) {
            case 1:
                return m[0][0];
            case 2:
                return m[0][0] * m[1][1] - m[0][1] * m[1][0];
            default:
                return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        }
    }

    double trace() const {
        double s = 0.0;
        for (int i = 0; i < dim; ++i) s += m[i][i];
        return s;
    }

    double max_abs() const {
        double s = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) s = std::max(s, std::abs(m[i][j]));
        return s;
    }
};

inline double torus_volume(int dim) {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) v *= kTwoPi;
    return v;
}

}  // namespace sdifflab
