#include "hyprec/fem/mesh.hpp"

#include <algorithm>
#include <stdexcept>

namespace hyprec::fem {

namespace {

// Kuhn simplices of the unit cube: walk from (0,0,0) to (1,1,1) along the
// axes in every order. Corner bit b is set when axis b has been stepped.
constexpr std::array<std::array<int, 3>, 6> kAxisOrders{{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
}};

} // namespace

StructuredMesh build_mesh(int dim, Index cells) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("build_mesh: dim must be 1, 2 or 3");
    if (cells < 2) throw std::invalid_argument("build_mesh: need at least 2 cells per axis");

    StructuredMesh mesh;
    mesh.dim = dim;
    mesh.cells = cells;
    const Index m = cells + 1;
    const Index my = dim >= 2 ? m : 1;
    const Index mz = dim >= 3 ? m : 1;
    const std::size_t n = static_cast<std::size_t>(m * my * mz);
    mesh.coords = DenseMatrix(n, static_cast<std::size_t>(dim));
    mesh.dirichlet.assign(n, 0);
    const double h = 1.0 / static_cast<double>(cells);

    for (Index k = 0; k < mz; ++k)
        for (Index j = 0; j < my; ++j)
            for (Index i = 0; i < m; ++i) {
                const auto node = static_cast<std::size_t>(mesh.node_index(i, j, k));
                const Index ijk[3] = {i, j, k};
                bool boundary = false;
                for (int a = 0; a < dim; ++a) {
                    // Exact endpoints so that boundary coordinates are 0 and 1.
                    mesh.coords(node, a) =
                        ijk[a] == cells ? 1.0 : static_cast<double>(ijk[a]) * h;
                    boundary = boundary || ijk[a] == 0 || ijk[a] == cells;
                }
                mesh.dirichlet[node] = boundary ? 1 : 0;
            }

    const Index cy = dim >= 2 ? cells : 1;
    const Index cz = dim >= 3 ? cells : 1;
    for (Index k = 0; k < cz; ++k)
        for (Index j = 0; j < cy; ++j)
            for (Index i = 0; i < cells; ++i) {
                auto corner = [&](int bits) {
                    return mesh.node_index(i + (bits & 1), j + ((bits >> 1) & 1),
                                           k + ((bits >> 2) & 1));
                };
                if (dim == 1) {
                    mesh.elements.push_back({corner(0), corner(1), -1, -1});
                } else if (dim == 2) {
                    mesh.elements.push_back({corner(0), corner(1), corner(3), -1});
                    mesh.elements.push_back({corner(0), corner(3), corner(2), -1});
                } else {
                    for (const auto& order : kAxisOrders) {
                        int bits = 0;
                        std::array<Index, 4> tet{};
                        tet[0] = corner(0);
                        for (int s = 0; s < 3; ++s) {
                            bits |= 1 << order[s];
                            tet[s + 1] = corner(bits);
                        }
                        mesh.elements.push_back(tet);
                    }
                }
            }
    return mesh;
}

Index cells_for_level(int dim, int level) {
    if (level < 1) throw std::invalid_argument("cells_for_level: level must be >= 1");
    Index base = 0;
    if (dim == 2)
        base = 39;
    else if (dim == 3)
        base = 15;
    else
        throw std::invalid_argument("cells_for_level: reference hierarchy exists for 2D/3D only");
    return base << (level - 1);
}

std::vector<std::vector<Index>> node_adjacency(const StructuredMesh& mesh) {
    std::vector<std::vector<Index>> adj(mesh.num_nodes());
    const int npe = mesh.nodes_per_element();
    for (const auto& e : mesh.elements)
        for (int a = 0; a < npe; ++a)
            for (int b = 0; b < npe; ++b)
                if (a != b) adj[e[a]].push_back(e[b]);
    for (auto& row : adj) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    return adj;
}

std::vector<Index> interior_nodes(const StructuredMesh& mesh) {
    std::vector<Index> idx;
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
        if (!mesh.dirichlet[i]) idx.push_back(static_cast<Index>(i));
    return idx;
}

} // namespace hyprec::fem
