#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hyprec/linalg/kernels.hpp"

namespace hyprec {

using Vector = std::vector<double>;

/// Row-major dense matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(std::span<const double> d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    Vector column(std::size_t j) const;
    void set_column(std::size_t j, std::span<const double> v);

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    DenseMatrix transpose() const;
    /// Columns `idx` in the given order.
    DenseMatrix select_columns(std::span<const std::size_t> idx) const;

    bool operator==(const DenseMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Vector matvec(const DenseMatrix& a, std::span<const double> x);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);

double frobenius_norm(const DenseMatrix& a);
double max_abs(const DenseMatrix& a);
bool all_finite(std::span<const double> v);

// Vector helpers on top of the kernels.
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);
Vector add(std::span<const double> x, std::span<const double> y);
Vector subtract(std::span<const double> x, std::span<const double> y);
Vector scaled(double a, std::span<const double> x);

} // namespace hyprec
