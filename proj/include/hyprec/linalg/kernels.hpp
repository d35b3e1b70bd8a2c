#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace hyprec {

using Index = std::int64_t;

/// Inner loops shared by the dense and sparse carriers.
///
/// The top-level functions are OpenMP-parallel. Every parallel kernel
/// produces results that do not depend on the number of threads: row-wise
/// kernels are bit-identical to their serial counterparts, and reductions
/// sum fixed-size chunks in a fixed order. The `serial` namespace keeps a
/// plain single-threaded reference of each kernel for testing and
/// benchmarking.
namespace kernels {

/// Reduction chunk length; part of the numerical contract of `dot`.
inline constexpr std::size_t kReductionChunk = 1024;

void spmv(std::size_t rows, const Index* row_ptr, const Index* col_idx,
          const double* vals, const double* x, double* y);

double dot(std::span<const double> x, std::span<const double> y);

/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

/// y = A x for a row-major rows x cols matrix.
void gemv(std::size_t rows, std::size_t cols, const double* a, const double* x, double* y);

/// C = A B, row-major, A is m x k and B is k x n.
void gemm(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
          double* c);

/// In-place lower Cholesky of a row-major SPD matrix (upper triangle left
/// untouched). Returns the index of the first non-positive pivot, or n.
std::size_t cholesky(std::size_t n, double* a);

/// In-place LU with partial pivoting. Unit-lower L and U share `a`;
/// `piv[k]` is the row swapped into position k. Returns the index of the
/// first pivot with magnitude <= tol, or n.
std::size_t lu(std::size_t n, double* a, std::size_t* piv, double tol);

namespace serial {

void spmv(std::size_t rows, const Index* row_ptr, const Index* col_idx,
          const double* vals, const double* x, double* y);
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void gemv(std::size_t rows, std::size_t cols, const double* a, const double* x, double* y);
void gemm(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
          double* c);
std::size_t cholesky(std::size_t n, double* a);
std::size_t lu(std::size_t n, double* a, std::size_t* piv, double tol);

} // namespace serial
} // namespace kernels
} // namespace hyprec
