#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hyprec/linalg/dense.hpp"

namespace hyprec {

/// Dense LU with partial pivoting, factored once at construction and
/// reused for every solve. Throws SingularMatrixError when a pivot falls
/// below n * eps * max|M|.
class LuFactorization {
public:
    LuFactorization() = default;
    explicit LuFactorization(DenseMatrix m);

    std::size_t size() const { return n_; }
    Vector solve(std::span<const double> b) const;
    void solve_in_place(std::span<double> x) const;

private:
    std::size_t n_ = 0;
    DenseMatrix lu_;
    std::vector<std::size_t> piv_;
};

/// One-shot convenience wrapper.
Vector lu_solve(const DenseMatrix& m, std::span<const double> b);

} // namespace hyprec
