#pragma once

#include <span>

#include "hyprec/linalg/csr.hpp"
#include "hyprec/precond/preconditioner.hpp"

namespace hyprec {

/// Largest system for which dense capture is attempted.
inline constexpr std::size_t kMaxDenseCapture = 600;

/// M applied to every unit vector, column by column. Throws
/// std::invalid_argument for a nonlinear M or n > kMaxDenseCapture.
DenseMatrix capture_dense(const Preconditioner& m);

/// E = I - A M by dense capture.
DenseMatrix error_propagation_dense(const CsrMatrix& a, const Preconditioner& m);

/// ||E v_j||_2 for every column v_j of `modes`.
Vector mode_amplification(const DenseMatrix& e, const DenseMatrix& modes);

/// <v_j, E v_j> / <v_j, v_j> for every column v_j of `modes`.
Vector mode_rayleigh(const DenseMatrix& e, const DenseMatrix& modes);

/// Rows and columns of `m` on the sorted index set `idx`.
DenseMatrix restrict_dense(const DenseMatrix& m, std::span<const Index> idx);

} // namespace hyprec
