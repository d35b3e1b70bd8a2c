#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hyprec/linalg/dense.hpp"

namespace hyprec {

struct Triplet {
    Index row;
    Index col;
    double value;
};

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row; duplicates are rejected at construction.
class CsrMatrix {
public:
    CsrMatrix() : row_ptr_{0} {}
    CsrMatrix(std::size_t rows, std::size_t cols, std::vector<Index> row_ptr,
              std::vector<Index> col_idx, std::vector<double> vals);

    static CsrMatrix identity(std::size_t n);
    /// Duplicate entries are summed.
    static CsrMatrix from_triplets(std::size_t rows, std::size_t cols,
                                   std::vector<Triplet> entries);
    /// Entries with |a_ij| <= drop are omitted.
    static CsrMatrix from_dense(const DenseMatrix& a, double drop = 0.0);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return vals_.size(); }

    const std::vector<Index>& row_ptr() const { return row_ptr_; }
    const std::vector<Index>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return vals_; }

    /// Zero where the diagonal entry is not stored.
    Vector diagonal() const;
    double at(std::size_t i, std::size_t j) const;

    DenseMatrix to_dense() const;
    CsrMatrix transpose() const;
    /// Principal submatrix on the sorted index set `idx`.
    CsrMatrix principal_submatrix(std::span<const Index> idx) const;
    CsrMatrix scaled(double s) const;

    bool operator==(const CsrMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Index> row_ptr_;
    std::vector<Index> col_idx_;
    std::vector<double> vals_;
};

Vector spmv(const CsrMatrix& a, std::span<const double> x);
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
/// y = A^T x
Vector spmv_transpose(const CsrMatrix& a, std::span<const double> x);
/// Sparse product A B.
CsrMatrix spgemm(const CsrMatrix& a, const CsrMatrix& b);
/// alpha A + beta B on the union pattern.
CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double alpha = 1.0, double beta = 1.0);
/// max |A - A^T| relative to max |A|.
double symmetry_defect(const CsrMatrix& a);

} // namespace hyprec
