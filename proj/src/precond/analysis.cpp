#include "hyprec/precond/analysis.hpp"

#include <stdexcept>

namespace hyprec {

DenseMatrix capture_dense(const Preconditioner& m) {
    if (!m.linear())
        throw std::invalid_argument("dense capture needs a linear preconditioner, got " + m.label());
    const std::size_t n = m.size();
    if (n > kMaxDenseCapture)
        throw std::invalid_argument("dense capture limited to n <= " +
                                    std::to_string(kMaxDenseCapture));
    DenseMatrix out(n, n);
    Vector e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        out.set_column(j, m.apply(e));
        e[j] = 0.0;
    }
    return out;
}

DenseMatrix error_propagation_dense(const CsrMatrix& a, const Preconditioner& m) {
    if (a.rows() != m.size() || a.cols() != m.size())
        throw std::invalid_argument("error propagation: size mismatch");
    const DenseMatrix am = matmul(a.to_dense(), capture_dense(m));
    return DenseMatrix::identity(m.size()) - am;
}

Vector mode_amplification(const DenseMatrix& e, const DenseMatrix& modes) {
    if (e.cols() != modes.rows()) throw std::invalid_argument("mode_amplification: size mismatch");
    const DenseMatrix ev = matmul(e, modes);
    Vector out(modes.cols());
    for (std::size_t j = 0; j < modes.cols(); ++j) out[j] = norm2(ev.column(j));
    return out;
}

Vector mode_rayleigh(const DenseMatrix& e, const DenseMatrix& modes) {
    if (e.cols() != modes.rows() || e.rows() != modes.rows())
        throw std::invalid_argument("mode_rayleigh: size mismatch");
    const DenseMatrix ev = matmul(e, modes);
    Vector out(modes.cols());
    for (std::size_t j = 0; j < modes.cols(); ++j) {
        const Vector v = modes.column(j);
        out[j] = dot(v, ev.column(j)) / dot(v, v);
    }
    return out;
}

DenseMatrix restrict_dense(const DenseMatrix& m, std::span<const Index> idx) {
    DenseMatrix out(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) out(i, j) = m(idx[i], idx[j]);
    return out;
}

} // namespace hyprec
