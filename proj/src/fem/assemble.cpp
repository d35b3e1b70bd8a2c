#include "hyprec/fem/assemble.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hyprec/util/errors.hpp"

namespace hyprec::fem {

namespace {

struct SimplexGeometry {
    double volume = 0.0;
    std::array<std::array<double, 3>, 4> grad{}; // grad of barycentric coordinate a
};

SimplexGeometry simplex_geometry(const StructuredMesh& mesh, const std::array<Index, 4>& e) {
    const int d = mesh.dim;
    // B has columns x_a - x_0, a = 1..d.
    double b[3][3] = {};
    for (int a = 1; a <= d; ++a)
        for (int r = 0; r < d; ++r)
            b[r][a - 1] = mesh.coords(e[a], r) - mesh.coords(e[0], r);

    double det = 0.0;
    double inv[3][3] = {};
    if (d == 1) {
        det = b[0][0];
        inv[0][0] = 1.0 / det;
    } else if (d == 2) {
        det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
        inv[0][0] = b[1][1] / det;
        inv[0][1] = -b[0][1] / det;
        inv[1][0] = -b[1][0] / det;
        inv[1][1] = b[0][0] / det;
    } else {
        det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
              b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
              b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
        inv[0][0] = (b[1][1] * b[2][2] - b[1][2] * b[2][1]) / det;
        inv[0][1] = (b[0][2] * b[2][1] - b[0][1] * b[2][2]) / det;
        inv[0][2] = (b[0][1] * b[1][2] - b[0][2] * b[1][1]) / det;
        inv[1][0] = (b[1][2] * b[2][0] - b[1][0] * b[2][2]) / det;
        inv[1][1] = (b[0][0] * b[2][2] - b[0][2] * b[2][0]) / det;
        inv[1][2] = (b[0][2] * b[1][0] - b[0][0] * b[1][2]) / det;
        inv[2][0] = (b[1][0] * b[2][1] - b[1][1] * b[2][0]) / det;
        inv[2][1] = (b[0][1] * b[2][0] - b[0][0] * b[2][1]) / det;
        inv[2][2] = (b[0][0] * b[1][1] - b[0][1] * b[1][0]) / det;
    }

    SimplexGeometry g;
    const double factorial[4] = {1.0, 1.0, 2.0, 6.0};
    g.volume = std::abs(det) / factorial[d];
    // Barycentric lambda_a (a >= 1) = row a-1 of B^{-1} applied to x - x_0.
    for (int a = 1; a <= d; ++a)
        for (int r = 0; r < d; ++r) {
            g.grad[a][r] = inv[a - 1][r];
            g.grad[0][r] -= inv[a - 1][r];
        }
    return g;
}

void check_length(std::span<const double> v, std::size_t n, const char* what) {
    if (v.size() != n)
        throw DimensionError(std::string(what) + ": expected " + std::to_string(n) +
                             " values, got " + std::to_string(v.size()));
}

} // namespace

CsrMatrix stiffness_matrix(const StructuredMesh& mesh, std::span<const double> element_coeff) {
    check_length(element_coeff, mesh.num_elements(), "stiffness_matrix");
    const int npe = mesh.nodes_per_element();
    std::vector<Triplet> t;
    t.reserve(mesh.num_elements() * npe * npe);
    for (std::size_t el = 0; el < mesh.num_elements(); ++el) {
        const auto& e = mesh.elements[el];
        const auto g = simplex_geometry(mesh, e);
        for (int a = 0; a < npe; ++a)
            for (int b = 0; b < npe; ++b) {
                double s = 0.0;
                for (int r = 0; r < mesh.dim; ++r) s += g.grad[a][r] * g.grad[b][r];
                t.push_back({e[a], e[b], element_coeff[el] * g.volume * s});
            }
    }
    return CsrMatrix::from_triplets(mesh.num_nodes(), mesh.num_nodes(), std::move(t));
}

CsrMatrix assemble_mass(const StructuredMesh& mesh) {
    const int npe = mesh.nodes_per_element();
    const double denom = static_cast<double>((mesh.dim + 1) * (mesh.dim + 2));
    std::vector<Triplet> t;
    t.reserve(mesh.num_elements() * npe * npe);
    for (const auto& e : mesh.elements) {
        const auto g = simplex_geometry(mesh, e);
        for (int a = 0; a < npe; ++a)
            for (int b = 0; b < npe; ++b)
                t.push_back({e[a], e[b], g.volume * (a == b ? 2.0 : 1.0) / denom});
    }
    return CsrMatrix::from_triplets(mesh.num_nodes(), mesh.num_nodes(), std::move(t));
}

Vector lump_mass(const StructuredMesh& mesh) {
    const CsrMatrix m = assemble_mass(mesh);
    Vector lumped(mesh.num_nodes(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (Index k = m.row_ptr()[i]; k < m.row_ptr()[i + 1]; ++k) lumped[i] += m.values()[k];
    return lumped;
}

CsrMatrix eliminate_dirichlet(const CsrMatrix& a, std::span<const std::uint8_t> mask) {
    if (mask.size() != a.rows() || a.rows() != a.cols())
        throw DimensionError("eliminate_dirichlet: mask length mismatch");
    std::vector<Index> rp(a.rows() + 1, 0), ci;
    std::vector<double> v;
    ci.reserve(a.nnz());
    v.reserve(a.nnz());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        if (mask[i]) {
            ci.push_back(static_cast<Index>(i));
            v.push_back(1.0);
        } else {
            for (Index k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
                if (mask[a.col_idx()[k]]) continue;
                ci.push_back(a.col_idx()[k]);
                v.push_back(a.values()[k]);
            }
        }
        rp[i + 1] = static_cast<Index>(ci.size());
    }
    return CsrMatrix(a.rows(), a.cols(), std::move(rp), std::move(ci), std::move(v));
}

CsrMatrix assemble_diffusion(const StructuredMesh& mesh, std::span<const double> nodal_k) {
    check_length(nodal_k, mesh.num_nodes(), "assemble_diffusion");
    for (std::size_t i = 0; i < nodal_k.size(); ++i)
        if (!(nodal_k[i] > 0.0))
            throw std::invalid_argument("assemble_diffusion: coefficient must be positive (node " +
                                        std::to_string(i) + ")");
    const int npe = mesh.nodes_per_element();
    Vector element_k(mesh.num_elements());
    for (std::size_t el = 0; el < mesh.num_elements(); ++el) {
        double s = 0.0;
        for (int a = 0; a < npe; ++a) s += nodal_k[mesh.elements[el][a]];
        element_k[el] = s / npe;
    }
    return eliminate_dirichlet(stiffness_matrix(mesh, element_k), mesh.dirichlet);
}

CsrMatrix assemble_diffusion_elementwise(const StructuredMesh& mesh,
                                         std::span<const double> element_k) {
    check_length(element_k, mesh.num_elements(), "assemble_diffusion_elementwise");
    for (double k : element_k)
        if (!(k > 0.0))
            throw std::invalid_argument("assemble_diffusion: coefficient must be positive");
    return eliminate_dirichlet(stiffness_matrix(mesh, element_k), mesh.dirichlet);
}

double helmholtz_max_h(double k_h) {
    return k_h == 0.0 ? INFINITY : std::numbers::pi / (5.0 * std::abs(k_h));
}

CsrMatrix assemble_helmholtz(const StructuredMesh& mesh, double k_h, bool allow_underresolved) {
    if (!allow_underresolved && mesh.h() > helmholtz_max_h(k_h) * (1.0 + 1e-12))
        throw std::invalid_argument("assemble_helmholtz: h = " + std::to_string(mesh.h()) +
                                    " violates h <= pi/(5 k_H) = " +
                                    std::to_string(helmholtz_max_h(k_h)));
    const Vector ones(mesh.num_elements(), 1.0);
    const CsrMatrix laplace = stiffness_matrix(mesh, ones);
    const CsrMatrix mass = assemble_mass(mesh);
    return eliminate_dirichlet(add(laplace, mass, 1.0, -k_h * k_h), mesh.dirichlet);
}

Vector load_vector(const StructuredMesh& mesh, std::span<const double> nodal_f) {
    check_length(nodal_f, mesh.num_nodes(), "load_vector");
    Vector b = spmv(assemble_mass(mesh), nodal_f);
    for (std::size_t i = 0; i < b.size(); ++i)
        if (mesh.dirichlet[i]) b[i] = 0.0;
    return b;
}

} // namespace hyprec::fem
