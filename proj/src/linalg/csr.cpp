#include "hyprec/linalg/csr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hyprec/util/errors.hpp"

namespace hyprec {

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols, std::vector<Index> row_ptr,
                     std::vector<Index> col_idx, std::vector<double> vals)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      vals_(std::move(vals)) {
    if (row_ptr_.size() != rows_ + 1 || row_ptr_.front() != 0)
        throw DimensionError("CsrMatrix: row_ptr must have rows+1 entries starting at 0");
    if (static_cast<std::size_t>(row_ptr_.back()) != col_idx_.size() ||
        col_idx_.size() != vals_.size())
        throw DimensionError("CsrMatrix: row_ptr[rows] must equal nnz");
    for (std::size_t i = 0; i < rows_; ++i) {
        if (row_ptr_[i + 1] < row_ptr_[i])
            throw DimensionError("CsrMatrix: row_ptr not monotone at row " + std::to_string(i));
        for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            if (col_idx_[k] < 0 || static_cast<std::size_t>(col_idx_[k]) >= cols_)
                throw DimensionError("CsrMatrix: column index out of range in row " +
                                     std::to_string(i));
            if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1])
                throw DimensionError("CsrMatrix: columns not strictly increasing in row " +
                                     std::to_string(i));
        }
    }
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
    std::vector<Index> rp(n + 1), ci(n);
    for (std::size_t i = 0; i <= n; ++i) rp[i] = static_cast<Index>(i);
    for (std::size_t i = 0; i < n; ++i) ci[i] = static_cast<Index>(i);
    return CsrMatrix(n, n, std::move(rp), std::move(ci), std::vector<double>(n, 1.0));
}

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                   std::vector<Triplet> entries) {
    for (const auto& t : entries)
        if (t.row < 0 || t.col < 0 || static_cast<std::size_t>(t.row) >= rows ||
            static_cast<std::size_t>(t.col) >= cols)
            throw DimensionError("from_triplets: entry out of range");
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<Index> rp(rows + 1, 0), ci;
    std::vector<double> v;
    ci.reserve(entries.size());
    v.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& t = entries[k];
        if (!ci.empty() && k > 0 && entries[k - 1].row == t.row && entries[k - 1].col == t.col) {
            v.back() += t.value;
            continue;
        }
        ci.push_back(t.col);
        v.push_back(t.value);
        ++rp[t.row + 1];
    }
    for (std::size_t i = 0; i < rows; ++i) rp[i + 1] += rp[i];
    return CsrMatrix(rows, cols, std::move(rp), std::move(ci), std::move(v));
}

CsrMatrix CsrMatrix::from_dense(const DenseMatrix& a, double drop) {
    std::vector<Index> rp(a.rows() + 1, 0), ci;
    std::vector<double> v;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (std::abs(a(i, j)) > drop) {
                ci.push_back(static_cast<Index>(j));
                v.push_back(a(i, j));
            }
        }
        rp[i + 1] = static_cast<Index>(ci.size());
    }
    return CsrMatrix(a.rows(), a.cols(), std::move(rp), std::move(ci), std::move(v));
}

Vector CsrMatrix::diagonal() const {
    Vector d(std::min(rows_, cols_), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(i, i);
    return d;
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
    const auto first = col_idx_.begin() + row_ptr_[i];
    const auto last = col_idx_.begin() + row_ptr_[i + 1];
    const auto it = std::lower_bound(first, last, static_cast<Index>(j));
    if (it == last || *it != static_cast<Index>(j)) return 0.0;
    return vals_[static_cast<std::size_t>(it - col_idx_.begin())];
}

DenseMatrix CsrMatrix::to_dense() const {
    DenseMatrix d(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d(i, col_idx_[k]) = vals_[k];
    return d;
}

CsrMatrix CsrMatrix::transpose() const {
    std::vector<Index> rp(cols_ + 1, 0);
    for (Index c : col_idx_) ++rp[c + 1];
    for (std::size_t j = 0; j < cols_; ++j) rp[j + 1] += rp[j];
    std::vector<Index> next(rp.begin(), rp.end() - 1);
    std::vector<Index> ci(nnz());
    std::vector<double> v(nnz());
    for (std::size_t i = 0; i < rows_; ++i)
        for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            const Index dst = next[col_idx_[k]]++;
            ci[dst] = static_cast<Index>(i);
            v[dst] = vals_[k];
        }
    return CsrMatrix(cols_, rows_, std::move(rp), std::move(ci), std::move(v));
}

CsrMatrix CsrMatrix::principal_submatrix(std::span<const Index> idx) const {
    std::vector<Index> local(cols_, -1);
    for (std::size_t a = 0; a < idx.size(); ++a) local[idx[a]] = static_cast<Index>(a);
    std::vector<Index> rp(idx.size() + 1, 0), ci;
    std::vector<double> v;
    for (std::size_t a = 0; a < idx.size(); ++a) {
        const Index i = idx[a];
        // Local column order follows idx, which callers keep sorted.
        std::vector<std::pair<Index, double>> row;
        for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            if (local[col_idx_[k]] >= 0) row.emplace_back(local[col_idx_[k]], vals_[k]);
        std::sort(row.begin(), row.end());
        for (const auto& [c, val] : row) {
            ci.push_back(c);
            v.push_back(val);
        }
        rp[a + 1] = static_cast<Index>(ci.size());
    }
    return CsrMatrix(idx.size(), idx.size(), std::move(rp), std::move(ci), std::move(v));
}

CsrMatrix CsrMatrix::scaled(double s) const {
    CsrMatrix out = *this;
    for (double& x : out.vals_) x *= s;
    return out;
}

Vector spmv(const CsrMatrix& a, std::span<const double> x) {
    Vector y(a.rows());
    spmv(a, x, y);
    return y;
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
    if (x.size() != a.cols() || y.size() != a.rows())
        throw DimensionError("spmv: dimension mismatch (" + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " times " + std::to_string(x.size()) +
                             ")");
    kernels::spmv(a.rows(), a.row_ptr().data(), a.col_idx().data(), a.values().data(), x.data(),
                  y.data());
}

Vector spmv_transpose(const CsrMatrix& a, std::span<const double> x) {
    if (x.size() != a.rows()) throw DimensionError("spmv_transpose: dimension mismatch");
    Vector y(a.cols(), 0.0);
    const auto& rp = a.row_ptr();
    const auto& ci = a.col_idx();
    const auto& v = a.values();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        for (Index k = rp[i]; k < rp[i + 1]; ++k) y[ci[k]] += v[k] * xi;
    }
    return y;
}

CsrMatrix spgemm(const CsrMatrix& a, const CsrMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("spgemm: dimension mismatch");
    const std::size_t n = b.cols();
    std::vector<double> acc(n, 0.0);
    std::vector<Index> marker(n, -1);
    std::vector<Index> rp(a.rows() + 1, 0), ci;
    std::vector<double> v;
    std::vector<Index> pattern;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        pattern.clear();
        for (Index ka = a.row_ptr()[i]; ka < a.row_ptr()[i + 1]; ++ka) {
            const Index p = a.col_idx()[ka];
            const double av = a.values()[ka];
            for (Index kb = b.row_ptr()[p]; kb < b.row_ptr()[p + 1]; ++kb) {
                const Index j = b.col_idx()[kb];
                if (marker[j] != static_cast<Index>(i)) {
                    marker[j] = static_cast<Index>(i);
                    acc[j] = 0.0;
                    pattern.push_back(j);
                }
                acc[j] += av * b.values()[kb];
            }
        }
        std::sort(pattern.begin(), pattern.end());
        for (Index j : pattern) {
            ci.push_back(j);
            v.push_back(acc[j]);
        }
        rp[i + 1] = static_cast<Index>(ci.size());
    }
    return CsrMatrix(a.rows(), n, std::move(rp), std::move(ci), std::move(v));
}

CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double alpha, double beta) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("add: shape mismatch");
    std::vector<Index> rp(a.rows() + 1, 0), ci;
    std::vector<double> v;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Index ka = a.row_ptr()[i], kb = b.row_ptr()[i];
        const Index ea = a.row_ptr()[i + 1], eb = b.row_ptr()[i + 1];
        while (ka < ea || kb < eb) {
            const Index ca = ka < ea ? a.col_idx()[ka] : INT64_MAX;
            const Index cb = kb < eb ? b.col_idx()[kb] : INT64_MAX;
            if (ca == cb) {
                ci.push_back(ca);
                v.push_back(alpha * a.values()[ka++] + beta * b.values()[kb++]);
            } else if (ca < cb) {
                ci.push_back(ca);
                v.push_back(alpha * a.values()[ka++]);
            } else {
                ci.push_back(cb);
                v.push_back(beta * b.values()[kb++]);
            }
        }
        rp[i + 1] = static_cast<Index>(ci.size());
    }
    return CsrMatrix(a.rows(), a.cols(), std::move(rp), std::move(ci), std::move(v));
}

double symmetry_defect(const CsrMatrix& a) {
    if (a.rows() != a.cols()) return INFINITY;
    double scale = 0.0, defect = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (Index k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
            scale = std::max(scale, std::abs(a.values()[k]));
            defect = std::max(defect, std::abs(a.values()[k] - a.at(a.col_idx()[k], i)));
        }
    return scale > 0.0 ? defect / scale : defect;
}

} // namespace hyprec
