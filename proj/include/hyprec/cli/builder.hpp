#pragma once

#include <functional>
#include <memory>

#include "hyprec/cli/config.hpp"
#include "hyprec/cli/expr.hpp"
#include "hyprec/fem/problem.hpp"
#include "hyprec/onet/basis.hpp"
#include "hyprec/onet/model.hpp"
#include "hyprec/precond/preconditioner.hpp"
#include "hyprec/util/rng.hpp"

namespace hyprec::cli {

struct BuildContext {
    const fem::Problem& problem;
    Rng& rng;
    std::shared_ptr<const onet::TrunkBasis> basis; ///< tb_* and M(k)
    std::shared_ptr<const onet::OnetModel> model;  ///< dp
};

/// Trunk basis described by the config; null when the basis is a model
/// file that cannot be read (reported when a tb_* node needs it).
std::shared_ptr<const onet::TrunkBasis> make_basis(const BasisConfig& cfg, int dim);

/// Jacobi damping used for `gamma=auto`: the Helmholtz rule for Helmholtz
/// problems, 2/3 otherwise.
double auto_jacobi_gamma(const fem::Problem& problem, double h);

/// Discretizes the problem's operator on another mesh of the same domain
/// (the problem's own mesh returns its matrix). Used for multigrid levels.
std::function<CsrMatrix(const fem::StructuredMesh&)> reassembler(const fem::Problem& problem);

/// Builds the preconditioner for `e` on ctx.problem. The top-level weight
/// scales the result.
Preconditioner build_preconditioner(const Expr& e, BuildContext& ctx);

} // namespace hyprec::cli
