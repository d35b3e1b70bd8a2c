#pragma once

#include <memory>
#include <vector>

#include "hyprec/fem/mesh.hpp"
#include "hyprec/linalg/csr.hpp"
#include "hyprec/onet/model.hpp"
#include "hyprec/precond/preconditioner.hpp"

namespace hyprec::onet {

/// Multilinear interpolation from mesh nodes to the given points
/// (rows x dim), as a (#points x #nodes) matrix. Throws
/// std::out_of_range when a point lies outside [0,1]^dim.
CsrMatrix sensor_interpolation(const fem::StructuredMesh& mesh, const DenseMatrix& points);

/// Everything a direct-preconditioning apply needs, fixed per problem.
struct DpContext {
    std::shared_ptr<const OnetModel> model;
    std::size_t rhs_branch = 0;
    Vector inv_lumped;         ///< nodal scaling r -> M_lumped^{-1} r
    CsrMatrix restriction;     ///< mesh nodes -> rhs branch sensors
    DenseMatrix trunk_rows;    ///< trunk at the mesh nodes
    Vector frozen_coefficient; ///< product of the non-rhs branch outputs
};

/// `frozen_inputs` has one entry per branch; the rhs slot is ignored and
/// may be empty. The rhs branch is model.rhs_branch, or branch 0.
DpContext make_dp_context(std::shared_ptr<const OnetModel> model, const fem::StructuredMesh& mesh,
                          const std::vector<Vector>& frozen_inputs);

/// z_j = sum_k (prod_{l != f} B^l_k) B^f_k(R M_lumped^{-1} v) T_k(x_j).
Vector dp_apply(const DpContext& ctx, std::span<const double> v);

/// Flagged nonlinear and non-SPD: usable only inside flexible GMRES.
Preconditioner make_dp_preconditioner(std::shared_ptr<const DpContext> ctx);

} // namespace hyprec::onet
