#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hyprec/linalg/dense.hpp"

namespace hyprec::fem {

/// Uniform grid on [0,1]^dim split into P1 simplices: segments in 1D,
/// two triangles per square in 2D and six Kuhn tetrahedra per cube in 3D.
/// All splits share the main diagonal so uniform refinement is nested.
struct StructuredMesh {
    int dim = 1;
    Index cells = 0;                           ///< per axis
    DenseMatrix coords;                        ///< num_nodes x dim
    std::vector<std::array<Index, 4>> elements; ///< first dim+1 entries used
    std::vector<std::uint8_t> dirichlet;       ///< 1 on the boundary

    double h() const { return 1.0 / static_cast<double>(cells); }
    Index nodes_per_axis() const { return cells + 1; }
    std::size_t num_nodes() const { return coords.rows(); }
    std::size_t num_elements() const { return elements.size(); }
    int nodes_per_element() const { return dim + 1; }

    Index node_index(Index i, Index j = 0, Index k = 0) const {
        const Index m = cells + 1;
        return i + m * (j + m * k);
    }
};

StructuredMesh build_mesh(int dim, Index cells);

/// Cells per axis of refinement level `level` (>= 1) of the reference
/// hierarchy: 39 * 2^(l-1) in 2D, 15 * 2^(l-1) in 3D.
Index cells_for_level(int dim, int level);

/// Node adjacency through shared elements, sorted, without self loops.
std::vector<std::vector<Index>> node_adjacency(const StructuredMesh& mesh);

/// Indices of nodes not on the boundary, ascending.
std::vector<Index> interior_nodes(const StructuredMesh& mesh);

} // namespace hyprec::fem
