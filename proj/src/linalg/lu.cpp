#include "hyprec/linalg/lu.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "hyprec/util/errors.hpp"

namespace hyprec {

LuFactorization::LuFactorization(DenseMatrix m) : n_(m.rows()), lu_(std::move(m)), piv_(n_) {
    if (lu_.rows() != lu_.cols()) throw DimensionError("LU: matrix must be square");
    const double scale = max_abs(lu_);
    const double tol = static_cast<double>(n_) * std::numeric_limits<double>::epsilon() * scale;
    const std::size_t bad = kernels::lu(n_, lu_.data().data(), piv_.data(), tol);
    if (bad != n_)
        throw SingularMatrixError("LU: pivot " + std::to_string(bad) +
                                  " is zero to working precision");
}

Vector LuFactorization::solve(std::span<const double> b) const {
    Vector x(b.begin(), b.end());
    solve_in_place(x);
    return x;
}

void LuFactorization::solve_in_place(std::span<double> x) const {
    if (x.size() != n_) throw DimensionError("LU solve: length mismatch");
    for (std::size_t k = 0; k < n_; ++k)
        if (piv_[k] != k) std::swap(x[k], x[piv_[k]]);
    for (std::size_t i = 1; i < n_; ++i) {
        const auto row = lu_.row(i);
        double s = x[i];
        for (std::size_t j = 0; j < i; ++j) s -= row[j] * x[j];
        x[i] = s;
    }
    for (std::size_t i = n_; i-- > 0;) {
        const auto row = lu_.row(i);
        double s = x[i];
        for (std::size_t j = i + 1; j < n_; ++j) s -= row[j] * x[j];
        x[i] = s / row[i];
    }
}

Vector lu_solve(const DenseMatrix& m, std::span<const double> b) {
    return LuFactorization(m).solve(b);
}

} // namespace hyprec
