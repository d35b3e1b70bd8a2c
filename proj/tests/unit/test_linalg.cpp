#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hyprec/linalg/banded.hpp"
#include "hyprec/linalg/csr.hpp"
#include "hyprec/linalg/dense.hpp"
#include "hyprec/linalg/eig.hpp"
#include "hyprec/linalg/kernels.hpp"
#include "hyprec/linalg/lu.hpp"
#include "hyprec/linalg/qr.hpp"
#include "hyprec/util/errors.hpp"
#include "oracles.hpp"

using namespace hyprec;

// ============================================================================
// CSR construction and spmv
// ============================================================================

TEST_CASE("spmv - identity returns the input") {
    const auto a = CsrMatrix::identity(5);
    const Vector x{1, 2, 3, 4, 5};
    CHECK(spmv(a, x) == x);
}

TEST_CASE("spmv - 1d laplacian on ones") {
    // (1/h) tridiag(-1,2,-1) with h = 1/4: interior rows sum to zero,
    // the two end rows keep one off-diagonal, so y = (4, 0, 4).
    const auto a = CsrMatrix::from_dense(oracle::laplacian_1d(3));
    const Vector y = spmv(a, Vector{1, 1, 1});
    CHECK(y[0] == doctest::Approx(4.0));
    CHECK(y[1] == doctest::Approx(0.0));
    CHECK(y[2] == doctest::Approx(4.0));
}

TEST_CASE("spmv - empty row gives zero") {
    // [[0 0], [3 1]] stored with an empty first row.
    const CsrMatrix a(2, 2, {0, 0, 2}, {0, 1}, {3.0, 1.0});
    const Vector y = spmv(a, Vector{2.0, 5.0});
    CHECK(y[0] == 0.0);
    CHECK(y[1] == 11.0);
}

TEST_CASE("spmv - length mismatch throws") {
    const auto a = CsrMatrix::identity(3);
    CHECK_THROWS_AS(spmv(a, Vector{1.0, 2.0}), DimensionError);
}

TEST_CASE("csr - rejects unsorted or duplicate columns") {
    CHECK_THROWS_AS(CsrMatrix(1, 3, {0, 2}, {2, 0}, {1.0, 1.0}), DimensionError);
    CHECK_THROWS_AS(CsrMatrix(1, 3, {0, 2}, {1, 1}, {1.0, 1.0}), DimensionError);
    CHECK_THROWS_AS(CsrMatrix(1, 3, {0, 1}, {3}, {1.0}), DimensionError);
}

TEST_CASE("csr - from_triplets sums duplicates") {
    const auto a = CsrMatrix::from_triplets(2, 2, {{0, 1, 1.5}, {0, 1, 2.5}, {1, 0, -1.0}});
    CHECK(a.nnz() == 2);
    CHECK(a.at(0, 1) == 4.0);
    CHECK(a.at(1, 0) == -1.0);
    CHECK(a.at(0, 0) == 0.0);
}

TEST_CASE("spmv - agrees with dense matvec on random matrices") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t rows = 1 + gen() % 60, cols = 1 + gen() % 60;
        const DenseMatrix d = oracle::random_sparse_dense(rows, cols, 0.15, gen);
        const auto a = CsrMatrix::from_dense(d);
        const Vector x = oracle::random_vector(cols, gen);
        CHECK(oracle::max_abs_diff(spmv(a, x), oracle::dense_matvec(d, x)) < 1e-13);
        CHECK(oracle::max_abs_diff(a.to_dense(), d) == 0.0);
        // Transpose agrees with the transposed dense array.
        const Vector xt = oracle::random_vector(rows, gen);
        CHECK(oracle::max_abs_diff(spmv_transpose(a, xt), oracle::dense_matvec(d.transpose(), xt)) <
              1e-13);
    }
}

TEST_CASE("spgemm - matches dense product") {
    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 20; ++trial) {
        const DenseMatrix a = oracle::random_sparse_dense(17, 23, 0.2, gen);
        const DenseMatrix b = oracle::random_sparse_dense(23, 9, 0.2, gen);
        const auto c = spgemm(CsrMatrix::from_dense(a), CsrMatrix::from_dense(b));
        CHECK(oracle::max_abs_diff(c.to_dense(), oracle::dense_matmul(a, b)) < 1e-13);
    }
}

TEST_CASE("csr - principal submatrix and add") {
    const auto lap = CsrMatrix::from_dense(oracle::laplacian_1d(6));
    const std::vector<Index> idx{1, 2, 4};
    const auto sub = lap.principal_submatrix(idx);
    CHECK(sub.rows() == 3);
    CHECK(sub.at(0, 1) == lap.at(1, 2));
    CHECK(sub.at(1, 2) == 0.0); // nodes 2 and 4 are not neighbours
    const auto twice = add(lap, lap, 1.0, 1.0);
    CHECK(oracle::max_abs_diff(twice.to_dense(), 2.0 * lap.to_dense()) == 0.0);
    CHECK(symmetry_defect(lap) == 0.0);
}

// ============================================================================
// QR
// ============================================================================

TEST_CASE("qr - identity is its own factor") {
    const auto [q, r] = qr_thin(DenseMatrix::identity(4));
    CHECK(oracle::max_abs_diff(q, oracle::identity(4)) < 1e-15);
    CHECK(oracle::max_abs_diff(r, oracle::identity(4)) < 1e-15);
}

TEST_CASE("qr - random tall matrices reconstruct with orthonormal Q") {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t cols = 1 + gen() % 12, rows = cols + gen() % 30;
        const DenseMatrix m = oracle::random_sparse_dense(rows, cols, 1.0, gen);
        const auto [q, r] = qr_thin(m);
        CHECK(oracle::orthonormality_defect(q) < 1e-12);
        CHECK(oracle::max_abs_diff(oracle::dense_matmul(q, r), m) < 1e-12);
        for (std::size_t i = 0; i < cols; ++i) {
            CHECK(r(i, i) >= 0.0);
            for (std::size_t j = 0; j < i; ++j) CHECK(r(i, j) == 0.0);
        }
    }
}

TEST_CASE("qr - duplicated column leaves a vanishing R diagonal") {
    std::mt19937_64 gen(22);
    DenseMatrix m = oracle::random_sparse_dense(10, 3, 1.0, gen);
    m.set_column(2, m.column(0));
    const auto [q, r] = qr_thin(m);
    CHECK(r(2, 2) < 1e-12 * r(0, 0));
}

TEST_CASE("qr - refactoring Q reproduces Q") {
    std::mt19937_64 gen(23);
    const DenseMatrix m = oracle::random_sparse_dense(15, 5, 1.0, gen);
    const auto first = qr_thin(m);
    const auto second = qr_thin(first.q);
    CHECK(oracle::max_abs_diff(second.q, first.q) < 1e-12);
}

TEST_CASE("qr - wide input throws") {
    CHECK_THROWS_AS(qr_thin(DenseMatrix(2, 3, 1.0)), DimensionError);
}

// ============================================================================
// LU
// ============================================================================

TEST_CASE("lu - scaled identity") {
    const Vector x = lu_solve(2.0 * DenseMatrix::identity(3), Vector{2, 4, 6});
    CHECK(x == Vector{1, 2, 3});
}

TEST_CASE("lu - 1d laplacian matches the tridiagonal solve") {
    const std::size_t n = 10;
    const double h = 1.0 / 11.0;
    const Vector b(n, 1.0);
    const Vector lower(n, -1.0 / h), diag(n, 2.0 / h), upper(n, -1.0 / h);
    const Vector expected = oracle::thomas(lower, diag, upper, b);
    CHECK(oracle::max_abs_diff(lu_solve(oracle::laplacian_1d(n), b), expected) < 1e-12);
}

TEST_CASE("lu - singular matrix throws") {
    DenseMatrix m(2, 2);
    m(0, 0) = 1;
    m(0, 1) = 2;
    m(1, 0) = 2;
    m(1, 1) = 4;
    CHECK_THROWS_AS(LuFactorization{m}, SingularMatrixError);
}

TEST_CASE("lu - round trip on random well-conditioned systems") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + gen() % 40;
        const DenseMatrix a = oracle::random_spd(n, gen);
        const Vector x = oracle::random_vector(n, gen);
        const Vector b = oracle::dense_matvec(a, x);
        const LuFactorization lu(a);
        const Vector got = lu.solve(b);
        CHECK(oracle::vec_norm(subtract(got, x)) <= 1e-10 * oracle::vec_norm(x));
    }
}

TEST_CASE("banded lu - agrees with dense elimination on banded nonsymmetric systems") {
    std::mt19937_64 gen(32);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 20 + gen() % 30, kl = 1 + gen() % 4, ku = 1 + gen() % 4;
        DenseMatrix d(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = (i > kl ? i - kl : 0); j <= std::min(n - 1, i + ku); ++j)
                d(i, j) = u(gen);
        const Vector b = oracle::random_vector(n, gen);
        const BandedLu lu(CsrMatrix::from_dense(d));
        CHECK(lu.lower_bandwidth() <= kl);
        CHECK(lu.upper_bandwidth() <= ku);
        const Vector x = lu.solve(b);
        const Vector r = subtract(oracle::dense_matvec(d, x), b);
        CHECK(oracle::vec_norm(r) < 1e-9 * oracle::vec_norm(b));
        CHECK(oracle::max_abs_diff(x, oracle::gauss_solve(d, b)) <
              1e-8 * std::max(1.0, oracle::vec_norm(x)));
    }
}

// ============================================================================
// Symmetric eigensolver and power iteration
// ============================================================================

TEST_CASE("sym_eig - diagonal matrix returns sorted diagonal") {
    const auto r = sym_eig(DenseMatrix::diagonal(Vector{3, 1, 2}));
    CHECK(r.values == Vector{1, 2, 3});
}

TEST_CASE("sym_eig - 1d dirichlet laplacian matches the analytic spectrum") {
    const auto r = sym_eig(oracle::laplacian_1d(9));
    const Vector ev = oracle::laplacian_1d_eigenvalues(9);
    for (std::size_t j = 0; j < 9; ++j)
        CHECK(r.values[j] == doctest::Approx(ev[j]).epsilon(1e-10));
}

TEST_CASE("sym_eig - zero matrix") {
    const auto r = sym_eig(DenseMatrix(4, 4));
    for (double v : r.values) CHECK(v == 0.0);
    CHECK(oracle::orthonormality_defect(r.vectors) < 1e-15);
}

TEST_CASE("sym_eig - nonsymmetric input throws") {
    DenseMatrix m = DenseMatrix::identity(3);
    m(0, 2) = 0.5;
    CHECK_THROWS_AS(sym_eig(m), std::invalid_argument);
}

TEST_CASE("sym_eig - M V = V Lambda with orthonormal V") {
    std::mt19937_64 gen(41);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + gen() % 30;
        const DenseMatrix a = oracle::random_spd(n, gen);
        const auto r = sym_eig(a);
        CHECK(std::is_sorted(r.values.begin(), r.values.end()));
        CHECK(oracle::orthonormality_defect(r.vectors) < 1e-11);
        const DenseMatrix av = oracle::dense_matmul(a, r.vectors);
        double defect = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                defect = std::max(defect, std::abs(av(i, j) - r.vectors(i, j) * r.values[j]));
        CHECK(defect < 1e-10 * r.values.back());
    }
}

TEST_CASE("power iteration - dominant eigenvalue of diagonal operators") {
    auto scale = [](double s) {
        return [s](std::span<const double> x) { return scaled(s, x); };
    };
    CHECK(spectral_radius_estimate(scale(0.5), 10, 50, 1) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(spectral_radius_estimate(scale(2.0), 10, 50, 1) == doctest::Approx(2.0).epsilon(1e-10));
    // diag(0.1, ..., 0.9): ratio 8/9 per step, 500 steps are plenty.
    Vector d;
    for (int i = 1; i <= 9; ++i) d.push_back(0.1 * i);
    auto diag = [&d](std::span<const double> x) {
        Vector y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = d[i] * x[i];
        return y;
    };
    CHECK(spectral_radius_estimate(diag, 9, 500, 3) == doctest::Approx(0.9).epsilon(1e-6));
}

// ============================================================================
// Parallel kernels against the serial reference
// ============================================================================

TEST_CASE("kernels - parallel spmv is bit-identical to serial") {
    std::mt19937_64 gen(51);
    const DenseMatrix d = oracle::random_sparse_dense(3000, 3000, 0.003, gen);
    const auto a = CsrMatrix::from_dense(d);
    const Vector x = oracle::random_vector(3000, gen);
    Vector yp(3000), ys(3000);
    kernels::spmv(a.rows(), a.row_ptr().data(), a.col_idx().data(), a.values().data(), x.data(),
                  yp.data());
    kernels::serial::spmv(a.rows(), a.row_ptr().data(), a.col_idx().data(), a.values().data(),
                          x.data(), ys.data());
    CHECK(yp == ys);
}

TEST_CASE("kernels - parallel dot is reproducible and close to serial") {
    std::mt19937_64 gen(52);
    const Vector x = oracle::random_vector(100000, gen), y = oracle::random_vector(100000, gen);
    const double p1 = kernels::dot(x, y), p2 = kernels::dot(x, y);
    CHECK(p1 == p2);
    CHECK(p1 == doctest::Approx(kernels::serial::dot(x, y)).epsilon(1e-12));
}

TEST_CASE("kernels - parallel gemm, gemv, lu and cholesky match serial") {
    std::mt19937_64 gen(53);
    const std::size_t n = 150;
    const DenseMatrix a = oracle::random_spd(n, gen);
    const DenseMatrix b = oracle::random_sparse_dense(n, 70, 1.0, gen);
    DenseMatrix cp(n, 70), cs(n, 70);
    kernels::gemm(n, n, 70, a.data().data(), b.data().data(), cp.data().data());
    kernels::serial::gemm(n, n, 70, a.data().data(), b.data().data(), cs.data().data());
    CHECK(oracle::max_abs_diff(cp, cs) < 1e-12);

    const Vector x = oracle::random_vector(n, gen);
    Vector gp(n), gs(n);
    kernels::gemv(n, n, a.data().data(), x.data(), gp.data());
    kernels::serial::gemv(n, n, a.data().data(), x.data(), gs.data());
    CHECK(gp == gs);

    DenseMatrix lp = a, ls = a;
    std::vector<std::size_t> pp(n), ps(n);
    CHECK(kernels::lu(n, lp.data().data(), pp.data(), 0.0) == n);
    CHECK(kernels::serial::lu(n, ls.data().data(), ps.data(), 0.0) == n);
    CHECK(pp == ps);
    CHECK(oracle::max_abs_diff(lp, ls) < 1e-12);

    DenseMatrix chp = a, chs = a;
    CHECK(kernels::cholesky(n, chp.data().data()) == n);
    CHECK(kernels::serial::cholesky(n, chs.data().data()) == n);
    CHECK(oracle::max_abs_diff(chp, chs) < 1e-12);
}

TEST_CASE("kernels - cholesky reports the first non-positive pivot") {
    DenseMatrix m = DenseMatrix::identity(3);
    m(2, 2) = -1.0;
    CHECK(kernels::cholesky(3, m.data().data()) == 2);
}
