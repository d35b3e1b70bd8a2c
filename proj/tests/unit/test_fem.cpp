#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hyprec/fem/assemble.hpp"
#include "hyprec/fem/grf.hpp"
#include "hyprec/fem/mesh.hpp"
#include "hyprec/fem/problem.hpp"
#include "hyprec/linalg/banded.hpp"
#include "hyprec/linalg/eig.hpp"
#include "hyprec/linalg/lu.hpp"
#include "hyprec/precond/analysis.hpp"
#include "hyprec/precond/multigrid.hpp"
#include "oracles.hpp"

using namespace hyprec;
using namespace hyprec::fem;

namespace {

Vector interior_values(const CsrMatrix& a, const StructuredMesh& mesh) {
    const auto idx = interior_nodes(mesh);
    return sym_eig(restrict_dense(a.to_dense(), idx)).values;
}

// lambda_max / lambda_min, the small end from power iteration on A^{-1}.
double condition_estimate(const CsrMatrix& a) {
    const BandedLu lu(a);
    const double big = spectral_radius_estimate(
        [&](std::span<const double> x) { return spmv(a, x); }, a.rows(), 400, 5);
    const double inv = spectral_radius_estimate(
        [&](std::span<const double> x) { return lu.solve(x); }, a.rows(), 400, 5);
    return big * inv;
}

} // namespace

// ============================================================================
// Meshes
// ============================================================================

TEST_CASE("mesh - reference levels have the expected node counts") {
    CHECK(build_mesh(2, 39).num_nodes() == 1600);
    CHECK(build_mesh(3, 15).num_nodes() == 4096);
    CHECK(cells_for_level(2, 1) == 39);
    CHECK(cells_for_level(2, 3) == 156);
    CHECK(cells_for_level(3, 2) == 30);
}

TEST_CASE("mesh - 1d with two cells has one interior node") {
    const auto m = build_mesh(1, 2);
    CHECK(m.num_nodes() == 3);
    CHECK(m.dirichlet == std::vector<std::uint8_t>{1, 0, 1});
    CHECK(m.coords(1, 0) == 0.5);
}

TEST_CASE("mesh - element counts and boundary flags") {
    const auto m2 = build_mesh(2, 6);
    CHECK(m2.num_elements() == 2 * 36);
    const auto m3 = build_mesh(3, 4);
    CHECK(m3.num_elements() == 6 * 64);
    // Boundary nodes: all minus the (cells-1)^d interior block.
    CHECK(interior_nodes(m2).size() == 25);
    CHECK(interior_nodes(m3).size() == 27);
    for (std::size_t i = 0; i < m3.num_nodes(); ++i) {
        bool on_face = false;
        for (int a = 0; a < 3; ++a)
            on_face = on_face || m3.coords(i, a) == 0.0 || m3.coords(i, a) == 1.0;
        CHECK(static_cast<bool>(m3.dirichlet[i]) == on_face);
    }
}

TEST_CASE("mesh - first axis runs fastest") {
    const auto m = build_mesh(2, 4);
    const Index i = m.node_index(3, 2);
    CHECK(i == 3 + 5 * 2);
    CHECK(m.coords(i, 0) == doctest::Approx(0.75));
    CHECK(m.coords(i, 1) == doctest::Approx(0.5));
}

TEST_CASE("mesh - every element has positive measure") {
    for (int dim : {1, 2, 3}) {
        const auto m = build_mesh(dim, 3);
        for (const auto& el : m.elements) {
            DenseMatrix j(dim, dim);
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b)
                    j(a, b) = m.coords(el[b + 1], a) - m.coords(el[0], a);
            double det = 0.0;
            if (dim == 1) det = j(0, 0);
            if (dim == 2) det = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
            if (dim == 3)
                det = j(0, 0) * (j(1, 1) * j(2, 2) - j(1, 2) * j(2, 1)) -
                      j(0, 1) * (j(1, 0) * j(2, 2) - j(1, 2) * j(2, 0)) +
                      j(0, 2) * (j(1, 0) * j(2, 1) - j(1, 1) * j(2, 0));
            CHECK(std::abs(det) > 0.0);
        }
    }
}

TEST_CASE("mesh - interior adjacency degree") {
    // Segments: 2 neighbours, diagonal-split squares: 6, Kuhn cubes: 14.
    const int expected[] = {0, 2, 6, 14};
    for (int dim : {1, 2, 3}) {
        const auto m = build_mesh(dim, 4);
        const auto adj = node_adjacency(m);
        const Index centre = m.node_index(2, dim > 1 ? 2 : 0, dim > 2 ? 2 : 0);
        CHECK(adj[centre].size() == static_cast<std::size_t>(expected[dim]));
    }
}

// ============================================================================
// Gaussian random fields
// ============================================================================

TEST_CASE("grf - zero sigma gives the constant mean") {
    GrfSampler s({0.7, 0.0, 0.1});
    Rng rng(1);
    const Vector v = s.sample(build_mesh(1, 8).coords, rng);
    for (double x : v) CHECK(x == 0.7);
}

TEST_CASE("grf - Monte Carlo covariance matches the kernel within 5 percent") {
    // Two points 0.01 apart with ell = 0.1: c = exp(-0.01 / 0.02) = 0.6065.
    GrfSampler s({0.0, 1.0, 0.1});
    DenseMatrix pts(2, 1);
    pts(0, 0) = 0.30;
    pts(1, 0) = 0.31;
    Rng rng(2024);
    const int n = 10000;
    double s00 = 0, s11 = 0, s01 = 0, m0 = 0, m1 = 0;
    for (int i = 0; i < n; ++i) {
        const Vector v = s.sample(pts, rng);
        m0 += v[0];
        m1 += v[1];
        s00 += v[0] * v[0];
        s11 += v[1] * v[1];
        s01 += v[0] * v[1];
    }
    m0 /= n;
    m1 /= n;
    const double c00 = s00 / n - m0 * m0, c11 = s11 / n - m1 * m1, c01 = s01 / n - m0 * m1;
    const double expected = std::exp(-0.5);
    CHECK(s.covariance(pts.row(0), pts.row(1)) == doctest::Approx(expected));
    CHECK(std::abs(c00 - 1.0) < 0.05);
    CHECK(std::abs(c11 - 1.0) < 0.05);
    CHECK(std::abs(c01 - expected) < 0.05 * expected);
}

TEST_CASE("grf - same seed gives the same field") {
    GrfSampler s({0.0, 1.0, 0.1});
    const auto m = build_mesh(2, 8);
    Rng a(5), b(5);
    CHECK(s.sample(m.coords, a) == s.sample(m.coords, b));
}

// ============================================================================
// Assembly
// ============================================================================

TEST_CASE("assembly - 1d unit coefficient stencil at h = 1/4") {
    const auto m = build_mesh(1, 4);
    const auto a = assemble_diffusion(m, Vector(5, 1.0));
    // Interior rows (1/h)[-1 2 -1] = [-4 8 -4]; boundary rows are identity.
    CHECK(a.at(0, 0) == 1.0);
    CHECK(a.at(0, 1) == 0.0);
    CHECK(a.at(2, 1) == doctest::Approx(-4.0));
    CHECK(a.at(2, 2) == doctest::Approx(8.0));
    CHECK(a.at(2, 3) == doctest::Approx(-4.0));
    CHECK(a.at(1, 0) == 0.0);
    CHECK(a.at(4, 4) == 1.0);
}

TEST_CASE("assembly - 2d unit coefficient gives the 5-point stencil") {
    const auto m = build_mesh(2, 6);
    const auto a = assemble_diffusion(m, Vector(m.num_nodes(), 1.0));
    const Index c = m.node_index(3, 3);
    CHECK(a.at(c, c) == doctest::Approx(4.0));
    CHECK(a.at(c, m.node_index(2, 3)) == doctest::Approx(-1.0));
    CHECK(a.at(c, m.node_index(3, 4)) == doctest::Approx(-1.0));
    // The diagonal couplings of the triangulation cancel.
    CHECK(std::abs(a.at(c, m.node_index(4, 4))) < 1e-14);
    CHECK(std::abs(a.at(c, m.node_index(2, 2))) < 1e-14);
}

TEST_CASE("assembly - 3d unit coefficient gives the 7-point stencil times h") {
    const auto m = build_mesh(3, 4);
    const auto a = assemble_diffusion(m, Vector(m.num_nodes(), 1.0));
    const Index c = m.node_index(2, 2, 2);
    CHECK(a.at(c, c) == doctest::Approx(6.0 * m.h()));
    CHECK(a.at(c, m.node_index(1, 2, 2)) == doctest::Approx(-m.h()));
    CHECK(std::abs(a.at(c, m.node_index(3, 3, 3))) < 1e-14);
}

TEST_CASE("assembly - coefficient scales the operator linearly") {
    const auto m = build_mesh(2, 5);
    const auto a1 = assemble_diffusion(m, Vector(m.num_nodes(), 1.0));
    const auto a3 = assemble_diffusion(m, Vector(m.num_nodes(), 3.0));
    for (Index i : interior_nodes(m))
        for (Index j : interior_nodes(m)) CHECK(a3.at(i, j) == doctest::Approx(3.0 * a1.at(i, j)));
}

TEST_CASE("assembly - non-positive coefficient is rejected") {
    const auto m = build_mesh(1, 4);
    Vector k(5, 1.0);
    k[2] = 0.0;
    CHECK_THROWS_AS(assemble_diffusion(m, k), std::invalid_argument);
}

TEST_CASE("assembly - operators are symmetric and SPD on random coefficients") {
    Rng rng(3);
    for (int dim : {1, 2, 3}) {
        const auto m = build_mesh(dim, dim == 3 ? 4 : 7);
        Vector k(m.num_nodes());
        for (double& x : k) x = std::exp(rng.uniform(-2.0, 2.0));
        const auto a = assemble_diffusion(m, k);
        CHECK(symmetry_defect(a) < 1e-14);
        CHECK(sym_eig(a.to_dense()).values.front() > 0.0);
    }
}

TEST_CASE("mass - consistent matrix against the 1d formula and lumping") {
    const auto m = build_mesh(1, 5);
    const auto mass = assemble_mass(m);
    const double h = 0.2;
    CHECK(mass.at(2, 2) == doctest::Approx(4.0 * h / 6.0));
    CHECK(mass.at(2, 3) == doctest::Approx(h / 6.0));
    CHECK(mass.at(0, 0) == doctest::Approx(2.0 * h / 6.0));
    for (int dim : {1, 2, 3}) {
        const auto mm = build_mesh(dim, 4);
        const Vector lumped = lump_mass(mm);
        const Vector rows = spmv(assemble_mass(mm), Vector(mm.num_nodes(), 1.0));
        CHECK(oracle::max_abs_diff(lumped, rows) < 1e-14);
        double total = 0.0;
        for (double v : lumped) total += v;
        CHECK(total == doctest::Approx(1.0)); // |[0,1]^d| = 1
        CHECK(lumped[mm.node_index(2, dim > 1 ? 2 : 0, dim > 2 ? 2 : 0)] ==
              doctest::Approx(std::pow(mm.h(), dim)));
    }
}

TEST_CASE("helmholtz - zero wave number equals the Laplacian") {
    const auto m = build_mesh(2, 6);
    const auto h0 = assemble_helmholtz(m, 0.0);
    const auto lap = assemble_diffusion(m, Vector(m.num_nodes(), 1.0));
    CHECK(oracle::max_abs_diff(h0.to_dense(), lap.to_dense()) < 1e-14);
}

TEST_CASE("helmholtz - 1d interior spectrum is stiffness minus k^2 mass") {
    // Stiffness and mass share the discrete sine eigenvectors, so
    // lambda_j = (2/h)(1 - cos j pi h) - k^2 (h/3)(2 + cos j pi h).
    const Index cells = 40;
    const double k = 10.0, h = 1.0 / cells;
    const auto m = build_mesh(1, cells);
    const Vector got = interior_values(assemble_helmholtz(m, k), m);
    Vector expected;
    for (Index j = 1; j < cells; ++j) {
        const double c = std::cos(j * std::numbers::pi * h);
        expected.push_back(2.0 / h * (1.0 - c) - k * k * h / 3.0 * (2.0 + c));
    }
    std::sort(expected.begin(), expected.end());
    CHECK(oracle::max_abs_diff(got, expected) < 1e-9);
}

TEST_CASE("helmholtz - resolution rule h <= pi / (5 k)") {
    // k = 60 gives h_max = pi/300 = 0.01047; 80 cells are too coarse
    // (lambda/h = 2 pi / (k h) = 8.38 points per wavelength), 96 are fine.
    CHECK(helmholtz_max_h(60.0) == doctest::Approx(std::numbers::pi / 300.0));
    CHECK(2.0 * std::numbers::pi / 60.0 * 80.0 == doctest::Approx(8.3776).epsilon(1e-4));
    CHECK_THROWS_AS(assemble_helmholtz(build_mesh(1, 80), 60.0), std::invalid_argument);
    CHECK_NOTHROW(assemble_helmholtz(build_mesh(1, 96), 60.0));
    CHECK_NOTHROW(assemble_helmholtz(build_mesh(1, 80), 60.0, true));
}

TEST_CASE("load vector - mass times f with zero boundary entries") {
    const auto m = build_mesh(1, 4);
    const Vector b = load_vector(m, Vector(5, 1.0));
    CHECK(b[0] == 0.0);
    CHECK(b[4] == 0.0);
    CHECK(b[2] == doctest::Approx(0.25));
}

// ============================================================================
// Galerkin consistency of nested P1 spaces
// ============================================================================

TEST_CASE("prolongation - coarse operator equals the Galerkin product") {
    for (int dim : {1, 2, 3}) {
        const Index coarse_cells = dim == 3 ? 2 : 4;
        const auto fine = build_mesh(dim, 2 * coarse_cells);
        const auto coarse = build_mesh(dim, coarse_cells);
        const auto af = assemble_diffusion(fine, Vector(fine.num_nodes(), 1.0));
        const auto ac = assemble_diffusion(coarse, Vector(coarse.num_nodes(), 1.0));
        const auto p = prolongation(fine, coarse);
        const auto galerkin = spgemm(p.transpose(), spgemm(af, p));
        const auto idx = interior_nodes(coarse);
        CHECK(oracle::max_abs_diff(restrict_dense(galerkin.to_dense(), idx),
                                   restrict_dense(ac.to_dense(), idx)) < 1e-12);
    }
}

TEST_CASE("prolongation - reproduces linear functions at interior nodes") {
    for (int dim : {1, 2, 3}) {
        const auto fine = build_mesh(dim, 8);
        const auto coarse = build_mesh(dim, 4);
        auto f = [dim](std::span<const double> x) {
            double s = 0.3;
            for (int a = 0; a < dim; ++a) s += (a + 1) * x[a];
            return s;
        };
        Vector vc(coarse.num_nodes());
        for (std::size_t i = 0; i < vc.size(); ++i) vc[i] = coarse.dirichlet[i] ? 0.0 : f(coarse.coords.row(i));
        const Vector vf = spmv(prolongation(fine, coarse), vc);
        // Fine nodes whose coarse element has no boundary vertex.
        for (std::size_t i = 0; i < fine.num_nodes(); ++i) {
            bool deep = true;
            for (int a = 0; a < dim; ++a)
                deep = deep && fine.coords(i, a) >= 0.25 - 1e-12 && fine.coords(i, a) <= 0.75 + 1e-12;
            if (deep) CHECK(vf[i] == doctest::Approx(f(fine.coords.row(i))));
            if (fine.dirichlet[i]) CHECK(vf[i] == 0.0);
        }
    }
}

// ============================================================================
// Problem families
// ============================================================================

TEST_CASE("problem - diffusion system is symmetric and solvable") {
    ProblemSpec spec;
    spec.variant = Variant::Diff;
    spec.dim = 2;
    spec.cells = 12;
    Rng rng(7);
    const Problem p = build_problem(spec, rng);
    CHECK(p.symmetric_positive_definite);
    CHECK(symmetry_defect(*p.a) < 1e-14);
    for (std::size_t i = 0; i < p.rhs.size(); ++i)
        if (p.mesh.dirichlet[i]) CHECK(p.rhs[i] == 0.0);
    const Vector u = lu_solve(p.a->to_dense(), p.rhs);
    CHECK(oracle::vec_norm(subtract(spmv(*p.a, u), p.rhs)) < 1e-10 * oracle::vec_norm(p.rhs));
    REQUIRE(p.inputs.size() == 2);
    CHECK(p.inputs[0].first == "coefficient");
    for (double k : p.inputs[0].second) CHECK(k > 0.0);
}

TEST_CASE("problem - log-normal coefficient has the requested mean") {
    ProblemSpec spec;
    spec.variant = Variant::Diff;
    spec.dim = 1;
    spec.cells = 32;
    ProblemFactory factory(spec);
    Rng rng(8);
    double sum = 0.0;
    std::size_t count = 0;
    for (int draw = 0; draw < 400; ++draw) {
        const Problem p = factory.build(rng);
        for (double k : p.inputs[0].second) sum += k;
        count += p.inputs[0].second.size();
    }
    CHECK(sum / count == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("problem - unit channel coefficient reduces to the Laplacian") {
    ProblemSpec jump;
    jump.variant = Variant::JumpDiff;
    jump.cells = 39;
    jump.channel_k = 1.0;
    ProblemSpec diff;
    diff.variant = Variant::Diff;
    diff.dim = 2;
    diff.cells = 39;
    diff.constant_coefficient = 1.0;
    Rng r1(1), r2(1);
    const auto pj = build_problem(jump, r1);
    const auto pd = build_problem(diff, r2);
    CHECK(oracle::max_abs_diff(pj.a->to_dense(), pd.a->to_dense()) < 1e-14);
    CHECK(pj.meta.at("channel_k") == 1.0);
}

TEST_CASE("problem - strong channels worsen the conditioning") {
    ProblemSpec spec;
    spec.variant = Variant::JumpDiff;
    spec.cells = 39;
    spec.channel_k = 1.0;
    Rng r1(1), r2(1);
    const double kappa1 = condition_estimate(*build_problem(spec, r1).a);
    spec.channel_k = 1e5;
    const double kappa5 = condition_estimate(*build_problem(spec, r2).a);
    CHECK(kappa5 > kappa1);
}

TEST_CASE("problem - channels cover the snapped boxes") {
    ProblemSpec spec;
    const auto m = build_mesh(2, 39);
    const Vector k = jump_coefficient(m, spec, 100.0);
    std::size_t in_channel = 0;
    for (double v : k) in_channel += v == 100.0;
    // Snapping to the 39-cell grid: x in [5, 34]/39 gives 29 cells, y in
    // [9, 13]/39 and [26, 30]/39 give 4 each; two triangles per cell.
    CHECK(in_channel == 2 * 29 * 4 * 2);
}

TEST_CASE("problem - Helm2D level parameters") {
    CHECK(helm2d_sigma(2) == doctest::Approx(0.8));
    CHECK(helm2d_sigma(3) == doctest::Approx(0.4));
    CHECK(helm2d_min_k(2) == doctest::Approx(std::numbers::pi / 1.6));
    CHECK(helm2d_min_k(4) == doctest::Approx(4.0 * std::numbers::pi / 1.6));
    ProblemSpec spec;
    spec.variant = Variant::Helm2D;
    spec.level = 2;
    Rng rng(4);
    const auto p = build_problem(spec, rng);
    CHECK(p.mesh.cells == 78);
    CHECK(p.meta.at("k_h") >= std::numbers::pi / 1.6);
    CHECK(p.meta.at("sigma_h") == doctest::Approx(0.8));
    CHECK_FALSE(p.symmetric_positive_definite);
    CHECK(p.inputs[0].second.size() == 2);
}

TEST_CASE("problem - variant names are case-insensitive") {
    CHECK(variant_from_string("Diff") == Variant::Diff);
    CHECK(variant_from_string("HELM1D") == Variant::Helm1D);
    CHECK(to_string(Variant::JumpDiff) == "jumpdiff");
    CHECK_THROWS(variant_from_string("poisson"));
}
