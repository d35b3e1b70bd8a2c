#include "hyprec/linalg/dense.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hyprec/util/errors.hpp"

namespace hyprec {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
        throw DimensionError("DenseMatrix: data length " + std::to_string(data_.size()) +
                             " != " + std::to_string(rows_) + "x" + std::to_string(cols_));
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> d) {
    DenseMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Vector DenseMatrix::column(std::size_t j) const {
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

void DenseMatrix::set_column(std::size_t j, std::span<const double> v) {
    if (v.size() != rows_) throw DimensionError("set_column: length mismatch");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

DenseMatrix DenseMatrix::select_columns(std::span<const std::size_t> idx) const {
    DenseMatrix out(rows_, idx.size());
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t c = 0; c < idx.size(); ++c) out(i, c) = (*this)(i, idx[c]);
    return out;
}

Vector matvec(const DenseMatrix& a, std::span<const double> x) {
    if (x.size() != a.cols()) throw DimensionError("matvec: dimension mismatch");
    Vector y(a.rows());
    kernels::gemv(a.rows(), a.cols(), a.data().data(), x.data(), y.data());
    return y;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("matmul: dimension mismatch");
    DenseMatrix c(a.rows(), b.cols());
    kernels::gemm(a.rows(), a.cols(), b.cols(), a.data().data(), b.data().data(),
                  c.data().data());
    return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("matrix difference: shape mismatch");
    DenseMatrix c = a;
    auto cd = c.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < cd.size(); ++i) cd[i] -= bd[i];
    return c;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("matrix sum: shape mismatch");
    DenseMatrix c = a;
    auto cd = c.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < cd.size(); ++i) cd[i] += bd[i];
    return c;
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
    DenseMatrix c = a;
    for (double& v : c.data()) v *= s;
    return c;
}

double frobenius_norm(const DenseMatrix& a) { return norm2(a.data()); }

double max_abs(const DenseMatrix& a) {
    double m = 0.0;
    for (double v : a.data()) m = std::max(m, std::abs(v));
    return m;
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("dot: length mismatch");
    return kernels::dot(x, y);
}

double norm2(std::span<const double> x) { return std::sqrt(kernels::dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
    if (x.size() != y.size()) throw DimensionError("axpy: length mismatch");
    kernels::axpy(a, x, y);
}

Vector add(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("add: length mismatch");
    Vector z(x.begin(), x.end());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += y[i];
    return z;
}

Vector subtract(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("subtract: length mismatch");
    Vector z(x.begin(), x.end());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] -= y[i];
    return z;
}

Vector scaled(double a, std::span<const double> x) {
    Vector z(x.begin(), x.end());
    for (double& v : z) v *= a;
    return z;
}

} // namespace hyprec
