#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "hyprec/linalg/dense.hpp"

namespace hyprec {

struct EigResult {
    Vector values;       ///< ascending
    DenseMatrix vectors; ///< column j pairs with values[j]
};

/// Full spectrum of a small symmetric matrix by cyclic Jacobi rotations.
/// Throws std::invalid_argument when M deviates from symmetry by more than
/// 1e-12 relative to max|M|.
EigResult sym_eig(const DenseMatrix& m);

using LinearOperator = std::function<Vector(std::span<const double>)>;

/// Power-iteration estimate of the dominant |eigenvalue| of `apply`, started
/// from a seeded random vector.
double spectral_radius_estimate(const LinearOperator& apply, std::size_t n, std::size_t iters,
                                std::uint64_t seed);

} // namespace hyprec
