#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace uoro {

// All numerics are double precision. The influence-balancing experiment
// spans ~18 orders of magnitude of loss, which float32 cannot represent.
using Vec = std::vector<double>;

// Dense row-major matrix.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vec data;

    Mat() = default;
    Mat(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    void set_zero() { data.assign(rows * cols, 0.0); }
};

inline void check_dim(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("dimension mismatch: ") + what);
}

inline double dot(const Vec& a, const Vec& b) {
    check_dim(a.size() == b.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double l2_norm(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// a += c * b
inline void axpy(Vec& a, double c, const Vec& b) {
    check_dim(a.size() == b.size(), "axpy");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += c * b[i];
}

inline void scale(Vec& v, double c) {
    for (double& x : v) x *= c;
}

inline Vec scaled(const Vec& v, double c) {
    Vec out(v);
    scale(out, c);
    return out;
}

inline Vec vec_add(const Vec& a, const Vec& b) {
    check_dim(a.size() == b.size(), "vec_add");
    Vec out(a);
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return out;
}

inline Mat outer(const Vec& v, const Vec& w) {
    Mat m(v.size(), w.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j)
            m(i, j) = v[i] * w[j];
    return m;
}

// y = M * x
inline void mat_vec(const Mat& m, const Vec& x, Vec& y) {
    check_dim(m.cols == x.size(), "mat_vec");
    y.assign(m.rows, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        double s = 0.0;
        const double* row = m.data.data() + i * m.cols;
        for (std::size_t j = 0; j < m.cols; ++j) s += row[j] * x[j];
        y[i] = s;
    }
}

inline Vec mat_vec(const Mat& m, const Vec& x) {
    Vec y;
    mat_vec(m, x, y);
    return y;
}

// y = r * M, with r a row vector of size m.rows.
inline void row_mat(const Vec& r, const Mat& m, Vec& y) {
    check_dim(m.rows == r.size(), "row_mat");
    y.assign(m.cols, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double ri = r[i];
        if (ri == 0.0) continue;
        const double* row = m.data.data() + i * m.cols;
        for (std::size_t j = 0; j < m.cols; ++j) y[j] += ri * row[j];
    }
}

inline Vec row_mat(const Vec& r, const Mat& m) {
    Vec y;
    row_mat(r, m, y);
    return y;
}

// C = A * B
inline void mat_mul(const Mat& a, const Mat& b, Mat& c) {
    check_dim(a.cols == b.rows, "mat_mul");
    c = Mat(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* brow = b.data.data() + k * b.cols;
            double* crow = c.data.data() + i * b.cols;
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
}

inline Mat mat_add(const Mat& a, const Mat& b) {
    check_dim(a.rows == b.rows && a.cols == b.cols, "mat_add");
    Mat c(a);
    for (std::size_t i = 0; i < b.data.size(); ++i) c.data[i] += b.data[i];
    return c;
}

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// Running compensated (Kahan) sum; keeps cumulative metrics exact over
// long horizons instead of re-deriving them from printed rows.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
    void reset() { sum = 0.0; carry = 0.0; }
};

}  // namespace uoro
