#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "dynlab/errors.hpp"

namespace dynlab {

// State coordinates live in R^d with the Euclidean inner product.
using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline bool all_finite(std::span<const double> a) {
    for (double x : a)
        if (!std::isfinite(x)) return false;
    return true;
}

// Small dense row-major matrix; used for saddle couplings and diffusion
// operators (d is desk-scale, no linear-algebra library needed).
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.a[i * n + i] = 1.0;
        return m;
    }

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    void apply(std::span<const double> x, std::span<double> out) const {
        for (std::size_t i = 0; i < rows; ++i) {
            double s = 0.0;
            const double* row = a.data() + i * cols;
            for (std::size_t j = 0; j < cols; ++j) s += row[j] * x[j];
            out[i] = s;
        }
    }

    Mat transposed() const {
        Mat t(cols, rows);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : a) s += v * v;
        return std::sqrt(s);
    }

    bool is_identity(double tol = 0.0) const {
        if (rows != cols) return false;
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) {
                const double want = (i == j) ? 1.0 : 0.0;
                if (std::abs((*this)(i, j) - want) > tol) return false;
            }
        return true;
    }

    friend bool operator==(const Mat&, const Mat&) = default;
};

// Largest singular value via power iteration on A^T A. Deterministic start,
// iterated to fixed-point tolerance; adequate for the small couplings here.
double spectral_norm(const Mat& m);

} // namespace dynlab
