#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hyprec/fem/mesh.hpp"
#include "hyprec/linalg/csr.hpp"
#include "hyprec/linalg/lu.hpp"
#include "hyprec/onet/basis.hpp"
#include "hyprec/precond/preconditioner.hpp"
#include "hyprec/precond/schwarz.hpp"
#include "hyprec/util/rng.hpp"

namespace hyprec::onet {

enum class ColumnSelection { Random, Leading };

struct TbOptions {
    std::size_t k = 32;
    ColumnSelection selection = ColumnSelection::Random;
    /// Column j of Q survives when R_jj >= eps_rel * max_i R_ii.
    double eps_rel = 1e-8;
    /// Block-sparse variant only: one Jacobi sweep P = (I - gamma D^{-1} A) Pbar.
    std::optional<double> smoothing_gamma;
};

struct TbProvenance {
    std::string basis_id;
    std::vector<std::size_t> columns; ///< selected trunk outputs, ascending
    double eps_rel = 0.0;
    std::optional<double> smoothing_gamma;
    std::vector<std::size_t> kept_per_block;
};

struct Prolongation {
    CsrMatrix p;
    TbProvenance provenance;
};

/// k distinct indices out of [0, p), ascending. Throws when k > p or k == 0.
std::vector<std::size_t> select_columns(std::size_t p, std::size_t k, ColumnSelection how, Rng& rng);

/// Orthonormal coarse basis from the trunk at the mesh nodes. Rows at
/// Dirichlet nodes are zeroed before the QR so the coarse space satisfies
/// the homogeneous boundary condition. Throws when every column is dropped.
Prolongation tb_dense(const TrunkBasis& basis, const fem::StructuredMesh& mesh,
                      const TbOptions& opts, Rng& rng);

/// Block-diagonal variant: one QR per non-overlapping subdomain on the
/// same selected columns, each block at most min(k, |block|) wide.
/// `a` is used only for prolongation smoothing.
Prolongation tb_sparse(const TrunkBasis& basis, const fem::StructuredMesh& mesh,
                       const Partition& partition, const CsrMatrix& a, const TbOptions& opts,
                       Rng& rng);

/// P, R = P^T and the factored coarse operator A_c = P^T A P.
struct TransferOps {
    std::shared_ptr<const CsrMatrix> a;
    CsrMatrix p;
    CsrMatrix r;
    DenseMatrix ac;
    LuFactorization ac_lu;
    TbProvenance provenance;

    std::size_t coarse_size() const { return p.cols(); }
};

/// Throws SingularMatrixError when A_c is singular.
std::shared_ptr<const TransferOps> coarse_build(std::shared_ptr<const CsrMatrix> a, Prolongation p);

/// C v = P A_c^{-1} P^T v.
Vector coarse_apply(const TransferOps& t, std::span<const double> v);

/// C as a preconditioner; flagged SPD when `spd` (A SPD implies A_c SPD).
Preconditioner make_coarse_preconditioner(std::shared_ptr<const TransferOps> t, bool spd,
                                          std::string label);

} // namespace hyprec::onet
