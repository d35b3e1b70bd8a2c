#include "hyprec/onet/transfer.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "hyprec/linalg/qr.hpp"
#include "hyprec/util/errors.hpp"

namespace hyprec::onet {

std::vector<std::size_t> select_columns(std::size_t p, std::size_t k, ColumnSelection how, Rng& rng) {
    if (k == 0 || k > p)
        throw std::invalid_argument("select_columns: need 1 <= k <= p (k=" + std::to_string(k) +
                                    ", p=" + std::to_string(p) + ")");
    std::vector<std::size_t> idx(p);
    std::iota(idx.begin(), idx.end(), 0);
    if (how == ColumnSelection::Random) {
        for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.index(p - i)]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

namespace {

/// Q columns kept by the relative R_jj rule.
std::vector<std::size_t> kept_columns(const QrResult& qr, double eps_rel) {
    double rmax = 0.0;
    for (std::size_t j = 0; j < qr.r.rows(); ++j) rmax = std::max(rmax, qr.r(j, j));
    std::vector<std::size_t> keep;
    if (rmax <= 0.0) return keep;
    for (std::size_t j = 0; j < qr.r.rows(); ++j)
        if (qr.r(j, j) >= eps_rel * rmax) keep.push_back(j);
    return keep;
}

} // namespace

Prolongation tb_dense(const TrunkBasis& basis, const fem::StructuredMesh& mesh,
                      const TbOptions& opts, Rng& rng) {
    if (basis.dim() != mesh.dim) throw DimensionError("tb_dense: basis and mesh dimensions differ");
    if (!(opts.eps_rel > 0.0)) throw std::invalid_argument("tb_dense: eps must be positive");
    const auto cols = select_columns(basis.size(), opts.k, opts.selection, rng);
    DenseMatrix t = basis.eval(mesh.coords).select_columns(cols);
    for (std::size_t i = 0; i < t.rows(); ++i)
        if (mesh.dirichlet[i]) std::fill(t.row(i).begin(), t.row(i).end(), 0.0);
    const QrResult qr = qr_thin(t);
    const auto keep = kept_columns(qr, opts.eps_rel);
    if (keep.empty()) throw std::runtime_error("tb_dense: every trunk column was dropped");
    Prolongation out;
    out.p = CsrMatrix::from_dense(qr.q.select_columns(keep));
    out.provenance = {basis.id(), cols, opts.eps_rel, std::nullopt, {keep.size()}};
    return out;
}

Prolongation tb_sparse(const TrunkBasis& basis, const fem::StructuredMesh& mesh,
                       const Partition& partition, const CsrMatrix& a, const TbOptions& opts,
                       Rng& rng) {
    if (basis.dim() != mesh.dim) throw DimensionError("tb_sparse: basis and mesh dimensions differ");
    if (!(opts.eps_rel > 0.0)) throw std::invalid_argument("tb_sparse: eps must be positive");
    validate_partition(partition, mesh.num_nodes());
    const auto cols = select_columns(basis.size(), opts.k, opts.selection, rng);
    const DenseMatrix t = basis.eval(mesh.coords).select_columns(cols);

    std::vector<Triplet> entries;
    std::vector<std::size_t> kept;
    Index next_col = 0;
    for (const auto& block : partition.nonoverlapping) {
        const std::size_t width = std::min(cols.size(), block.size());
        DenseMatrix b(block.size(), width);
        for (std::size_t i = 0; i < block.size(); ++i) {
            if (mesh.dirichlet[block[i]]) continue;
            for (std::size_t j = 0; j < width; ++j) b(i, j) = t(block[i], j);
        }
        const QrResult qr = qr_thin(b);
        const auto keep = kept_columns(qr, opts.eps_rel);
        kept.push_back(keep.size());
        for (std::size_t c = 0; c < keep.size(); ++c) {
            for (std::size_t i = 0; i < block.size(); ++i) {
                const double v = qr.q(i, keep[c]);
                if (v != 0.0) entries.push_back({block[i], next_col, v});
            }
            ++next_col;
        }
    }
    if (next_col == 0) throw std::runtime_error("tb_sparse: every trunk column was dropped");
    CsrMatrix p = CsrMatrix::from_triplets(mesh.num_nodes(), static_cast<std::size_t>(next_col),
                                           std::move(entries));
    if (opts.smoothing_gamma) {
        if (a.rows() != mesh.num_nodes()) throw DimensionError("tb_sparse: operator size mismatch");
        const Vector d = a.diagonal();
        std::vector<Triplet> scale;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (d[i] == 0.0) throw std::invalid_argument("tb_sparse: zero diagonal in A");
            scale.push_back({Index(i), Index(i), *opts.smoothing_gamma / d[i]});
        }
        const CsrMatrix dinv = CsrMatrix::from_triplets(d.size(), d.size(), std::move(scale));
        p = add(p, spgemm(dinv, spgemm(a, p)), 1.0, -1.0);
    }
    Prolongation out;
    out.p = std::move(p);
    out.provenance = {basis.id(), cols, opts.eps_rel, opts.smoothing_gamma, std::move(kept)};
    return out;
}

std::shared_ptr<const TransferOps> coarse_build(std::shared_ptr<const CsrMatrix> a, Prolongation p) {
    if (!a) throw std::invalid_argument("coarse_build: null operator");
    if (p.p.rows() != a->rows()) throw DimensionError("coarse_build: P has the wrong row count");
    auto t = std::make_shared<TransferOps>();
    t->a = a;
    t->r = p.p.transpose();
    t->ac = spgemm(t->r, spgemm(*a, p.p)).to_dense();
    t->p = std::move(p.p);
    t->provenance = std::move(p.provenance);
    try {
        t->ac_lu = LuFactorization(t->ac);
    } catch (const SingularMatrixError& e) {
        throw SingularMatrixError(std::string("coarse operator A_c is singular: ") + e.what());
    }
    return t;
}

Vector coarse_apply(const TransferOps& t, std::span<const double> v) {
    if (v.size() != t.p.rows()) throw DimensionError("coarse_apply: length mismatch");
    Vector vc = spmv(t.r, v);
    t.ac_lu.solve_in_place(vc);
    return spmv(t.p, vc);
}

Preconditioner make_coarse_preconditioner(std::shared_ptr<const TransferOps> t, bool spd,
                                          std::string label) {
    const std::size_t n = t->p.rows();
    return Preconditioner(
        n, [t](std::span<const double> v) { return coarse_apply(*t, v); }, PrecFlags{true, spd},
        std::move(label));
}

} // namespace hyprec::onet
