#include "hyprec/linalg/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace hyprec::kernels {

namespace {

// Below this much work the OpenMP fork costs more than it saves.
constexpr std::size_t kParallelWork = 1 << 14;

inline double row_dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t m = 0; m < n; ++m) s += a[m] * b[m];
    return s;
}

} // namespace

void spmv(std::size_t rows, const Index* row_ptr, const Index* col_idx, const double* vals,
          const double* x, double* y) {
    const auto n = static_cast<std::int64_t>(rows);
#pragma omp parallel for schedule(static) if (static_cast<std::size_t>(row_ptr[rows]) > kParallelWork)
    for (std::int64_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (Index k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += vals[k] * x[col_idx[k]];
        y[i] = s;
    }
}

double dot(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
    if (chunks <= 1) return row_dot(x.data(), y.data(), n);
    std::vector<double> partial(chunks);
    const auto nc = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(static) if (n > kParallelWork)
    for (std::int64_t c = 0; c < nc; ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * kReductionChunk;
        const std::size_t hi = std::min(n, lo + kReductionChunk);
        partial[c] = row_dot(x.data() + lo, y.data() + lo, hi - lo);
    }
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() > kParallelWork)
    for (std::int64_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void gemv(std::size_t rows, std::size_t cols, const double* a, const double* x, double* y) {
    const auto n = static_cast<std::int64_t>(rows);
#pragma omp parallel for schedule(static) if (rows * cols > kParallelWork)
    for (std::int64_t i = 0; i < n; ++i) y[i] = row_dot(a + i * cols, x, cols);
}

void gemm(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
          double* c) {
    const auto rows = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(static) if (m * k * n > kParallelWork)
    for (std::int64_t i = 0; i < rows; ++i) {
        double* ci = c + i * n;
        std::fill(ci, ci + n, 0.0);
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a[i * k + p];
            if (aip == 0.0) continue;
            const double* bp = b + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
}

std::size_t cholesky(std::size_t n, double* a) {
    for (std::size_t j = 0; j < n; ++j) {
        double* rj = a + j * n;
        const double d = rj[j] - row_dot(rj, rj, j);
        if (!(d > 0.0)) return j;
        const double ljj = std::sqrt(d);
        rj[j] = ljj;
        const auto lo = static_cast<std::int64_t>(j + 1);
        const auto hi = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if ((n - j) * j > kParallelWork)
        for (std::int64_t i = lo; i < hi; ++i) {
            double* ri = a + i * n;
            ri[j] = (ri[j] - row_dot(ri, rj, j)) / ljj;
        }
    }
    return n;
}

std::size_t lu(std::size_t n, double* a, std::size_t* piv, double tol) {
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(a[k * n + k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(a[i * n + k]);
            if (v > best) {
                best = v;
                p = i;
            }
        }
        piv[k] = p;
        if (!(best > tol)) return k;
        if (p != k) std::swap_ranges(a + k * n, a + (k + 1) * n, a + p * n);
        const double* rk = a + k * n;
        const double pivot = rk[k];
        const auto lo = static_cast<std::int64_t>(k + 1);
        const auto hi = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if ((n - k) * (n - k) > kParallelWork)
        for (std::int64_t i = lo; i < hi; ++i) {
            double* ri = a + i * n;
            const double l = ri[k] / pivot;
            ri[k] = l;
            if (l == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) ri[j] -= l * rk[j];
        }
    }
    return n;
}

namespace serial {

void spmv(std::size_t rows, const Index* row_ptr, const Index* col_idx, const double* vals,
          const double* x, double* y) {
    for (std::size_t i = 0; i < rows; ++i) {
        double s = 0.0;
        for (Index k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += vals[k] * x[col_idx[k]];
        y[i] = s;
    }
}

double dot(std::span<const double> x, std::span<const double> y) {
    return row_dot(x.data(), y.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void gemv(std::size_t rows, std::size_t cols, const double* a, const double* x, double* y) {
    for (std::size_t i = 0; i < rows; ++i) y[i] = row_dot(a + i * cols, x, cols);
}

void gemm(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
          double* c) {
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * b[p * n + j];
            c[i * n + j] = s;
        }
}

std::size_t cholesky(std::size_t n, double* a) {
    for (std::size_t j = 0; j < n; ++j) {
        double* rj = a + j * n;
        const double d = rj[j] - row_dot(rj, rj, j);
        if (!(d > 0.0)) return j;
        const double ljj = std::sqrt(d);
        rj[j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double* ri = a + i * n;
            ri[j] = (ri[j] - row_dot(ri, rj, j)) / ljj;
        }
    }
    return n;
}

std::size_t lu(std::size_t n, double* a, std::size_t* piv, double tol) {
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(a[k * n + k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a[i * n + k]) > best) {
                best = std::abs(a[i * n + k]);
                p = i;
            }
        }
        piv[k] = p;
        if (!(best > tol)) return k;
        if (p != k)
            for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double l = a[i * n + k] / a[k * n + k];
            a[i * n + k] = l;
            if (l == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= l * a[k * n + j];
        }
    }
    return n;
}

} // namespace serial
} // namespace hyprec::kernels
