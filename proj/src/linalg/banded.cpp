#include "hyprec/linalg/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hyprec/util/errors.hpp"

namespace hyprec {

BandedLu::BandedLu(const CsrMatrix& a) : n_(a.rows()) {
    if (a.rows() != a.cols()) throw DimensionError("BandedLu: matrix must be square");
    const auto& rp = a.row_ptr();
    const auto& ci = a.col_idx();
    const auto& v = a.values();
    double scale = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        for (Index q = rp[i]; q < rp[i + 1]; ++q) {
            const std::size_t j = static_cast<std::size_t>(ci[q]);
            if (j < i) kl_ = std::max(kl_, i - j);
            else ku_ = std::max(ku_, j - i);
            scale = std::max(scale, std::abs(v[q]));
        }
    }
    // Pivoting can push U up to kl + ku above the diagonal.
    width_ = 2 * kl_ + ku_ + 1;
    band_.assign(n_ * width_, 0.0);
    piv_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (Index q = rp[i]; q < rp[i + 1]; ++q) at(i, static_cast<std::size_t>(ci[q])) = v[q];

    const double tol = static_cast<double>(std::max<std::size_t>(n_, 1)) *
                       std::numeric_limits<double>::epsilon() * scale;
    for (std::size_t k = 0; k < n_; ++k) {
        const std::size_t last_row = std::min(n_ - 1, k + kl_);
        const std::size_t last_col = std::min(n_ - 1, k + kl_ + ku_);
        std::size_t p = k;
        for (std::size_t i = k + 1; i <= last_row; ++i)
            if (std::abs(at(i, k)) > std::abs(at(p, k))) p = i;
        if (!(std::abs(at(p, k)) > tol))
            throw SingularMatrixError("BandedLu: pivot " + std::to_string(k) + " vanishes");
        piv_[k] = p;
        if (p != k)
            for (std::size_t j = k; j <= last_col; ++j) std::swap(at(k, j), at(p, j));
        const double d = at(k, k);
        for (std::size_t i = k + 1; i <= last_row; ++i) {
            const double l = at(i, k) / d;
            at(i, k) = l;
            if (l == 0.0) continue;
            for (std::size_t j = k + 1; j <= last_col; ++j) at(i, j) -= l * at(k, j);
        }
    }
}

Vector BandedLu::solve(std::span<const double> b) const {
    if (b.size() != n_) throw DimensionError("BandedLu::solve: length mismatch");
    Vector x(b.begin(), b.end());
    for (std::size_t k = 0; k < n_; ++k) {
        std::swap(x[k], x[piv_[k]]);
        const std::size_t last_row = std::min(n_ - 1, k + kl_);
        for (std::size_t i = k + 1; i <= last_row; ++i) x[i] -= at(i, k) * x[k];
    }
    for (std::size_t k = n_; k-- > 0;) {
        const std::size_t last_col = std::min(n_ - 1, k + kl_ + ku_);
        double s = x[k];
        for (std::size_t j = k + 1; j <= last_col; ++j) s -= at(k, j) * x[j];
        x[k] = s / at(k, k);
    }
    return x;
}

} // namespace hyprec
