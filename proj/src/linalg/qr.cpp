#include "hyprec/linalg/qr.hpp"

#include <cmath>

#include "hyprec/util/errors.hpp"

namespace hyprec {

QrResult qr_thin(const DenseMatrix& m) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    if (rows < cols) throw DimensionError("qr_thin: requires rows >= cols");

    DenseMatrix a = m;
    // Householder vectors are stored column-wise in `v`, scaled so that
    // H_j = I - beta_j v_j v_j^T.
    DenseMatrix v(rows, cols);
    Vector beta(cols, 0.0);

    for (std::size_t j = 0; j < cols; ++j) {
        double sigma = 0.0;
        for (std::size_t i = j; i < rows; ++i) sigma += a(i, j) * a(i, j);
        const double norm_x = std::sqrt(sigma);
        if (norm_x == 0.0) continue;
        const double x0 = a(j, j);
        const double alpha = x0 >= 0.0 ? -norm_x : norm_x;
        double vnorm2 = 0.0;
        for (std::size_t i = j; i < rows; ++i) {
            v(i, j) = a(i, j);
            if (i == j) v(i, j) -= alpha;
            vnorm2 += v(i, j) * v(i, j);
        }
        if (vnorm2 == 0.0) continue;
        beta[j] = 2.0 / vnorm2;
        for (std::size_t c = j; c < cols; ++c) {
            double s = 0.0;
            for (std::size_t i = j; i < rows; ++i) s += v(i, j) * a(i, c);
            s *= beta[j];
            for (std::size_t i = j; i < rows; ++i) a(i, c) -= s * v(i, j);
        }
        for (std::size_t i = j + 1; i < rows; ++i) a(i, j) = 0.0;
    }

    // Q = H_0 H_1 ... H_{cols-1} applied to the first cols columns of I.
    DenseMatrix q(rows, cols);
    for (std::size_t j = 0; j < cols; ++j) q(j, j) = 1.0;
    for (std::size_t jj = cols; jj-- > 0;) {
        if (beta[jj] == 0.0) continue;
        for (std::size_t c = 0; c < cols; ++c) {
            double s = 0.0;
            for (std::size_t i = jj; i < rows; ++i) s += v(i, jj) * q(i, c);
            s *= beta[jj];
            for (std::size_t i = jj; i < rows; ++i) q(i, c) -= s * v(i, jj);
        }
    }

    DenseMatrix r(cols, cols);
    for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t c = i; c < cols; ++c) r(i, c) = a(i, c);

    for (std::size_t j = 0; j < cols; ++j) {
        if (r(j, j) < 0.0) {
            for (std::size_t c = j; c < cols; ++c) r(j, c) = -r(j, c);
            for (std::size_t i = 0; i < rows; ++i) q(i, j) = -q(i, j);
        }
    }
    return {std::move(q), std::move(r)};
}

} // namespace hyprec
