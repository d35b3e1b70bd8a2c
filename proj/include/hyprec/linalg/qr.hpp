#pragma once

#include "hyprec/linalg/dense.hpp"

namespace hyprec {

struct QrResult {
    DenseMatrix q; ///< rows x cols, orthonormal columns
    DenseMatrix r; ///< cols x cols, upper triangular, nonnegative diagonal
};

/// Thin Householder QR of a tall matrix (rows >= cols). Rank deficiency is
/// not an error; it shows up as small diagonal entries of R.
QrResult qr_thin(const DenseMatrix& m);

} // namespace hyprec
