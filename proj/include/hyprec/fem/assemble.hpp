#pragma once

#include <span>

#include "hyprec/fem/mesh.hpp"
#include "hyprec/linalg/csr.hpp"

namespace hyprec::fem {

/// P1 stiffness matrix with one coefficient value per element, no boundary
/// treatment.
CsrMatrix stiffness_matrix(const StructuredMesh& mesh, std::span<const double> element_coeff);

/// Consistent P1 mass matrix on all nodes (no boundary treatment).
CsrMatrix assemble_mass(const StructuredMesh& mesh);

/// Row sums of the consistent mass matrix.
Vector lump_mass(const StructuredMesh& mesh);

/// Replaces every Dirichlet row and column by the identity, removing the
/// couplings, so that symmetry is preserved.
CsrMatrix eliminate_dirichlet(const CsrMatrix& a, std::span<const std::uint8_t> mask);

/// -div(K grad u) with K given at nodes; each element uses the mean of its
/// nodal values. Throws std::invalid_argument for K <= 0.
CsrMatrix assemble_diffusion(const StructuredMesh& mesh, std::span<const double> nodal_k);

/// Same operator with one K value per element.
CsrMatrix assemble_diffusion_elementwise(const StructuredMesh& mesh,
                                         std::span<const double> element_k);

/// Largest mesh size satisfying h <= pi / (5 k_H).
double helmholtz_max_h(double k_h);

/// -Laplace(u) - k_H^2 u. Throws std::invalid_argument when the mesh is too
/// coarse for k_H unless `allow_underresolved` is set.
CsrMatrix assemble_helmholtz(const StructuredMesh& mesh, double k_h,
                             bool allow_underresolved = false);

/// Load vector M f for nodal f with Dirichlet entries set to zero.
Vector load_vector(const StructuredMesh& mesh, std::span<const double> nodal_f);

} // namespace hyprec::fem
