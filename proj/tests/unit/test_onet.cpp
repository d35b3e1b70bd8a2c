#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <set>

#include "hyprec/fem/assemble.hpp"
#include "hyprec/fem/mesh.hpp"
#include "hyprec/io/container.hpp"
#include "hyprec/linalg/eig.hpp"
#include "hyprec/onet/basis.hpp"
#include "hyprec/onet/dp.hpp"
#include "hyprec/onet/model.hpp"
#include "hyprec/onet/network.hpp"
#include "hyprec/onet/onetpack.hpp"
#include "hyprec/onet/transfer.hpp"
#include "hyprec/precond/analysis.hpp"
#include "hyprec/precond/composite.hpp"
#include "hyprec/precond/jacobi.hpp"
#include "hyprec/util/errors.hpp"
#include "oracles.hpp"

using namespace hyprec;
using namespace hyprec::onet;

namespace {

Vector random_weights(std::size_t n, std::mt19937_64& gen) {
    return oracle::random_vector(n, gen);
}

std::vector<Layer> random_ffn(const std::vector<std::size_t>& widths, std::mt19937_64& gen) {
    std::vector<Layer> layers;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        const bool last = i + 2 == widths.size();
        layers.push_back(dense_layer(widths[i], widths[i + 1],
                                     last ? Activation::None : Activation::Tanh,
                                     random_weights(widths[i] * widths[i + 1], gen),
                                     random_weights(widths[i + 1], gen)));
    }
    return layers;
}

// Branch with constant output `b` whatever the input (zero weights).
Branch constant_branch(std::size_t sensors, const Vector& b) {
    Branch br;
    br.sensors = uniform_sensor_grid(1, sensors);
    br.layers.push_back(dense_layer(sensors, b.size(), Activation::None,
                                    Vector(sensors * b.size(), 0.0), b));
    return br;
}

// One trained-looking model: FFN branch on a 1D sensor grid, FFN trunk.
OnetModel small_model(std::mt19937_64& gen, std::size_t p = 8) {
    OnetModel m;
    m.p = p;
    Branch b;
    b.sensors = uniform_sensor_grid(1, 9);
    b.layers = random_ffn({9, 12, p}, gen);
    m.branches.push_back(b);
    m.trunk = random_ffn({1, 10, p}, gen);
    m.boundary_mask = BoundaryMask::Poly;
    m.id = "small";
    return m;
}

/// Returns the first column twice, then the second: a rank-deficient family.
class DuplicateBasis final : public TrunkBasis {
public:
    std::size_t size() const override { return 3; }
    int dim() const override { return 1; }
    DenseMatrix eval(const DenseMatrix& pts) const override {
        DenseMatrix s = SineBasis(1, 2).eval(pts);
        DenseMatrix out(pts.rows(), 3);
        for (std::size_t i = 0; i < pts.rows(); ++i) {
            out(i, 0) = s(i, 0);
            out(i, 1) = s(i, 0);
            out(i, 2) = s(i, 1);
        }
        return out;
    }
    std::string id() const override { return "dup"; }
};

std::shared_ptr<const CsrMatrix> poisson(const fem::StructuredMesh& m) {
    return std::make_shared<CsrMatrix>(fem::assemble_diffusion(m, Vector(m.num_nodes(), 1.0)));
}

DenseMatrix nodal_sines(const fem::StructuredMesh& m, std::size_t count) {
    return SineBasis(m.dim, count).eval(m.coords);
}

} // namespace

// ============================================================================
// Layers
// ============================================================================

TEST_CASE("network - dense layer computes W x + b") {
    // W = [[1 2], [3 4], [5 6]], b = (1, 0, -1), x = (1, -1).
    const auto l = dense_layer(2, 3, Activation::None, {1, 2, 3, 4, 5, 6}, {1, 0, -1});
    const Vector y = forward({l}, {2}, Vector{1.0, -1.0});
    CHECK(y == Vector{0.0, -1.0, -2.0});
    const auto r = dense_layer(2, 3, Activation::Relu, {1, 2, 3, 4, 5, 6}, {1, 0, -1});
    CHECK(forward({r}, {2}, Vector{1.0, -1.0}) == Vector{0.0, 0.0, 0.0});
}

TEST_CASE("network - 1d conv with stride 2 and padding 1") {
    // Input (1,2,3,4), kernel (1,1,1): outputs at centres 0 and 2 are
    // 0+1+2 = 3 and 2+3+4 = 9.
    const auto c = conv_layer(1, 1, 1, Activation::None, {1, 1, 1}, {0});
    CHECK(layer_output_shape(c, {1, 4}) == TensorShape{1, 2});
    CHECK(forward({c}, {1, 4}, Vector{1, 2, 3, 4}) == Vector{3, 9});
}

TEST_CASE("network - 2d conv picks the right taps") {
    // 3x3 input 1..9 row-major, kernel with only the centre tap: output
    // is the input at (0,0) and (0,2), (2,0), (2,2) with stride 2.
    Vector w(9, 0.0);
    w[4] = 1.0;
    const auto c = conv_layer(2, 1, 1, Activation::None, w, {0.5});
    CHECK(forward({c}, {1, 3, 3}, Vector{1, 2, 3, 4, 5, 6, 7, 8, 9}) == Vector{1.5, 3.5, 7.5, 9.5});
}

TEST_CASE("network - 3d conv stack shrinks 16^3 to a single voxel") {
    std::vector<Layer> stack;
    std::size_t c_in = 1;
    for (int i = 0; i < 4; ++i) {
        stack.push_back(conv_layer(3, c_in, 180, Activation::Relu, Vector(c_in * 180 * 27, 0.0),
                                   Vector(180, 0.0)));
        c_in = 180;
    }
    CHECK(stack_output_shape(stack, {1, 16, 16, 16}) == TensorShape{180, 1, 1, 1});
    stack.push_back(flatten_layer());
    CHECK(stack_output_shape(stack, {1, 16, 16, 16}) == TensorShape{180});
}

TEST_CASE("network - shape mismatches are reported") {
    const auto l = dense_layer(3, 2, Activation::None, Vector(6, 0.0), Vector(2, 0.0));
    CHECK_THROWS_AS(layer_output_shape(l, {4}), DimensionError);
    Layer bad = l;
    bad.bias.pop_back();
    CHECK_THROWS_AS(layer_output_shape(bad, {3}), DimensionError);
    CHECK_THROWS_AS(layer_kind_from_string("lstm"), FormatError);
    CHECK_THROWS_AS(activation_from_string("gelu"), FormatError);
}

TEST_CASE("network - batched dense forward equals row-by-row forward") {
    std::mt19937_64 gen(121);
    const auto layers = random_ffn({2, 7, 5}, gen);
    DenseMatrix x(6, 2);
    for (double& v : x.data()) v = std::uniform_real_distribution<double>(0, 1)(gen);
    const DenseMatrix y = forward_dense_batch(layers, x);
    for (std::size_t i = 0; i < 6; ++i) {
        const auto row = x.row(i);
        const Vector yi = forward(layers, {2}, Vector(row.begin(), row.end()));
        for (std::size_t k = 0; k < 5; ++k) CHECK(y(i, k) == doctest::Approx(yi[k]).epsilon(1e-14));
    }
}

// ============================================================================
// Model evaluation
// ============================================================================

TEST_CASE("model - unit branch and identity trunk reproduce x") {
    // B = e_1, T_1(x) = x, T_2(x) = 0: G(y)(x) = x.
    OnetModel m;
    m.p = 2;
    m.branches.push_back(constant_branch(4, {1.0, 0.0}));
    m.trunk = {dense_layer(1, 2, Activation::None, {1.0, 0.0}, {0.0, 0.0})};
    CHECK_NOTHROW(validate(m));
    DenseMatrix pts(3, 1);
    pts(0, 0) = 0.1;
    pts(1, 0) = 0.5;
    pts(2, 0) = 0.9;
    const Vector g = infer(m, {Vector(4, 0.3)}, pts);
    CHECK(oracle::max_abs_diff(g, Vector{0.1, 0.5, 0.9}) < 1e-15);
}

TEST_CASE("model - multi-input output is the sum of branch products") {
    // B1 = (2, 3), B2 = (5, 7), T = (1, 1): G = 2*5 + 3*7 = 31.
    OnetModel m;
    m.p = 2;
    m.branches.push_back(constant_branch(3, {2.0, 3.0}));
    m.branches.push_back(constant_branch(5, {5.0, 7.0}));
    m.trunk = {dense_layer(1, 2, Activation::None, {0.0, 0.0}, {1.0, 1.0})};
    DenseMatrix pts(1, 1, 0.25);
    CHECK(infer(m, {Vector(3, 0.0), Vector(5, 0.0)}, pts)[0] == doctest::Approx(31.0));
}

TEST_CASE("model - polynomial mask vanishes on the boundary") {
    std::mt19937_64 gen(122);
    const OnetModel m = small_model(gen);
    DenseMatrix pts(3, 1);
    pts(0, 0) = 0.0;
    pts(1, 0) = 1.0;
    pts(2, 0) = 0.5;
    const DenseMatrix t = trunk_eval(m, pts);
    OnetModel raw = m;
    raw.boundary_mask = BoundaryMask::None;
    const DenseMatrix tr = trunk_eval(raw, pts);
    for (std::size_t k = 0; k < m.p; ++k) {
        CHECK(t(0, k) == 0.0);
        CHECK(t(1, k) == 0.0);
        CHECK(t(2, k) == tr(2, k)); // b(0.5) = 1
    }
    CHECK(poly_mask(Vector{0.5, 0.25}) == doctest::Approx(0.75));
}

TEST_CASE("model - trunk is mesh-free") {
    std::mt19937_64 gen(123);
    const OnetModel m = small_model(gen);
    const auto coarse = fem::build_mesh(1, 4), fine = fem::build_mesh(1, 8);
    const DenseMatrix tc = trunk_eval(m, coarse.coords), tf = trunk_eval(m, fine.coords);
    // Shared nodes x = i/4 = 2i/8 get identical values.
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t k = 0; k < m.p; ++k) CHECK(tc(i, k) == tf(2 * i, k));
}

TEST_CASE("model - zero branch output gives a zero field") {
    OnetModel m;
    m.p = 3;
    m.branches.push_back(constant_branch(4, Vector(3, 0.0)));
    std::mt19937_64 gen(124);
    m.trunk = random_ffn({2, 5, 3}, gen);
    const auto mesh = fem::build_mesh(2, 4);
    for (double v : infer(m, {Vector(4, 1.0)}, mesh.coords)) CHECK(v == 0.0);
}

TEST_CASE("model - validation rejects inconsistent models") {
    std::mt19937_64 gen(125);
    OnetModel m = small_model(gen);
    CHECK_NOTHROW(validate(m));
    OnetModel wide = m;
    wide.p = 9;
    CHECK_THROWS_AS(validate(wide), FormatError);
    OnetModel nan = m;
    nan.trunk[0].weight[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(validate(nan), FormatError);
    OnetModel bad_rhs = m;
    bad_rhs.rhs_branch = 3;
    CHECK_THROWS_AS(validate(bad_rhs), FormatError);
}

// ============================================================================
// ONetPack
// ============================================================================

TEST_CASE("onetpack - round trip is bit-exact") {
    std::mt19937_64 gen(131);
    OnetModel m = small_model(gen);
    m.rhs_branch = 0;
    const io::Bytes bytes = encode_model(m);
    const OnetModel back = decode_model(bytes);
    CHECK(back == m);
    CHECK(encode_model(back) == bytes);
}

TEST_CASE("onetpack - Helm1D-sized model round trip") {
    // Branch FFN[1, 120, 120, 128] on a parameter vector, trunk FFN[1, 150, 150, 128].
    std::mt19937_64 gen(132);
    OnetModel m;
    m.p = 128;
    Branch b;
    b.sensors.dim = 0;
    b.sensors.shape = {1};
    b.layers = random_ffn({1, 120, 120, 128}, gen);
    m.branches.push_back(b);
    m.trunk = random_ffn({1, 150, 150, 128}, gen);
    const OnetModel back = decode_model(encode_model(m));
    CHECK(back == m);
    CHECK(back.trunk_dim() == 1);
}

TEST_CASE("onetpack - conv branch with flatten survives encoding") {
    std::mt19937_64 gen(133);
    OnetModel m;
    m.p = 4;
    Branch b;
    b.sensors = uniform_sensor_grid(2, 4);
    b.layers.push_back(conv_layer(2, 1, 3, Activation::Relu, random_weights(27, gen), random_weights(3, gen)));
    b.layers.push_back(flatten_layer());
    b.layers.push_back(dense_layer(12, 4, Activation::None, random_weights(48, gen), random_weights(4, gen)));
    m.branches.push_back(b);
    m.trunk = random_ffn({2, 6, 4}, gen);
    const io::Bytes bytes = encode_model(m);
    CHECK(decode_model(bytes) == m);
    // The flatten layer carries null offsets in the manifest.
    const auto c = io::decode(bytes, {'O', 'N', 'P', 'K'});
    CHECK(c.manifest["branches"][0]["layers"][1]["weight_offset"].is_null());
}

TEST_CASE("onetpack - truncation and corruption fail loudly") {
    std::mt19937_64 gen(134);
    const io::Bytes bytes = encode_model(small_model(gen));
    for (std::size_t cut : {std::size_t(0), std::size_t(3), std::size_t(10), std::size_t(20),
                            bytes.size() / 2, bytes.size() - 1}) {
        const io::Bytes part(bytes.begin(), bytes.begin() + static_cast<long>(cut));
        CHECK_THROWS_AS(decode_model(part), FormatError);
    }
    io::Bytes wrong = bytes;
    wrong[0] = 'X';
    CHECK_THROWS_AS(decode_model(wrong), FormatError);
}

TEST_CASE("onetpack - unknown activation in the manifest is rejected") {
    std::mt19937_64 gen(135);
    auto c = io::decode(encode_model(small_model(gen)), {'O', 'N', 'P', 'K'});
    c.manifest["trunk"]["layers"][0]["activation"] = "swish";
    CHECK_THROWS_AS(decode_model(io::encode(c)), FormatError);
    c.manifest["trunk"]["layers"][0]["activation"] = "tanh";
    c.manifest["nf"] = 2;
    CHECK_THROWS_AS(decode_model(io::encode(c)), FormatError);
}

TEST_CASE("onetpack - non-finite weights cannot be written") {
    std::mt19937_64 gen(136);
    OnetModel m = small_model(gen);
    m.branches[0].layers[0].bias[0] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(encode_model(m), FormatError);
}

// ============================================================================
// Sine basis
// ============================================================================

TEST_CASE("sine basis - mode ordering and boundary values") {
    const SineBasis s2(2, 5);
    CHECK(s2.mode(0)[0] == 1);
    CHECK(s2.mode(0)[1] == 1);
    // |m|^2 = 5 twice, lexicographic: (1,2) before (2,1).
    CHECK(s2.mode(1)[0] == 1);
    CHECK(s2.mode(1)[1] == 2);
    CHECK(s2.mode(2)[0] == 2);
    CHECK(s2.mode(3)[0] == 2);
    CHECK(s2.mode(3)[1] == 2);
    const auto mesh = fem::build_mesh(2, 6);
    const DenseMatrix v = s2.eval(mesh.coords);
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
        if (mesh.dirichlet[i])
            for (std::size_t k = 0; k < 5; ++k) CHECK(v(i, k) == 0.0);
}

TEST_CASE("sine basis - nodal modes are eigenvectors of the discrete Laplacian") {
    const auto mesh = fem::build_mesh(1, 20);
    const auto a = poisson(mesh);
    const DenseMatrix v = nodal_sines(mesh, 6);
    for (std::size_t j = 0; j < 6; ++j) {
        const Vector col = v.column(j);
        const Vector av = spmv(*a, col);
        const double lambda = dot(av, col) / dot(col, col);
        CHECK(oracle::max_abs_diff(av, scaled(lambda, col)) < 1e-10 * lambda);
    }
}

// ============================================================================
// Trunk-basis coarse spaces
// ============================================================================

TEST_CASE("select_columns - leading, random and bounds") {
    Rng rng(1);
    CHECK(select_columns(10, 3, ColumnSelection::Leading, rng) == std::vector<std::size_t>{0, 1, 2});
    for (int t = 0; t < 50; ++t) {
        const auto c = select_columns(20, 7, ColumnSelection::Random, rng);
        CHECK(c.size() == 7);
        CHECK(std::is_sorted(c.begin(), c.end()));
        CHECK(std::set<std::size_t>(c.begin(), c.end()).size() == 7);
        CHECK(c.back() < 20);
    }
    CHECK_THROWS_AS(select_columns(4, 5, ColumnSelection::Random, rng), std::invalid_argument);
    CHECK_THROWS_AS(select_columns(4, 0, ColumnSelection::Random, rng), std::invalid_argument);
}

TEST_CASE("tb_dense - orthonormal columns spanning the selected modes") {
    const auto mesh = fem::build_mesh(1, 32);
    Rng rng(2);
    const auto pr = tb_dense(SineBasis(1, 16), mesh, {5, ColumnSelection::Leading, 1e-8, {}}, rng);
    const DenseMatrix p = pr.p.to_dense();
    CHECK(p.cols() == 5);
    CHECK(oracle::orthonormality_defect(p) < 1e-12);
    const DenseMatrix modes = nodal_sines(mesh, 6);
    const DenseMatrix proj = oracle::dense_matmul(p, p.transpose());
    for (std::size_t j = 0; j < 5; ++j) {
        const Vector v = modes.column(j);
        CHECK(oracle::max_abs_diff(oracle::dense_matvec(proj, v), v) < 1e-12);
    }
    // The sixth mode is orthogonal to the space.
    CHECK(oracle::vec_norm(oracle::dense_matvec(proj, modes.column(5))) < 1e-12);
    CHECK(pr.provenance.columns == std::vector<std::size_t>{0, 1, 2, 3, 4});
}

TEST_CASE("tb_dense - duplicate trunk outputs reduce the kept width") {
    const auto mesh = fem::build_mesh(1, 16);
    Rng rng(3);
    const auto pr = tb_dense(DuplicateBasis(), mesh, {3, ColumnSelection::Leading, 1e-8, {}}, rng);
    CHECK(pr.p.cols() == 2);
    CHECK(pr.provenance.kept_per_block == std::vector<std::size_t>{2});
}

TEST_CASE("tb_sparse - a single block equals the dense construction") {
    const auto mesh = fem::build_mesh(2, 8);
    const auto a = poisson(mesh);
    const SineBasis basis(2, 12);
    Rng r1(4), r2(4);
    const TbOptions opts{6, ColumnSelection::Random, 1e-8, {}};
    const auto dense = tb_dense(basis, mesh, opts, r1);
    const auto sparse = tb_sparse(basis, mesh, partition_structured(mesh, 1, 0), *a, opts, r2);
    CHECK(dense.provenance.columns == sparse.provenance.columns);
    CHECK(oracle::max_abs_diff(dense.p.to_dense(), sparse.p.to_dense()) < 1e-12);
}

TEST_CASE("tb_sparse - unsmoothed blocks are orthonormal and disjoint") {
    const auto mesh = fem::build_mesh(2, 15);
    const auto a = poisson(mesh);
    const auto part = partition_structured(mesh, 4, 1);
    Rng rng(5);
    const auto pr = tb_sparse(SineBasis(2, 16), mesh, part, *a, {8, ColumnSelection::Leading, 1e-8, {}}, rng);
    CHECK(oracle::orthonormality_defect(pr.p.to_dense()) < 1e-12);
    // Every column lives in one non-overlapping block.
    const auto pt = pr.p.transpose();
    std::size_t col = 0;
    for (std::size_t s = 0; s < part.size(); ++s) {
        const std::set<Index> block(part.nonoverlapping[s].begin(), part.nonoverlapping[s].end());
        for (std::size_t c = 0; c < pr.provenance.kept_per_block[s]; ++c, ++col)
            for (Index k = pt.row_ptr()[col]; k < pt.row_ptr()[col + 1]; ++k)
                CHECK(block.count(pt.col_idx()[k]) == 1);
    }
    CHECK(col == pr.p.cols());
}

TEST_CASE("tb_sparse - smoothing extends each column by one ring") {
    const auto mesh = fem::build_mesh(2, 15);
    const auto a = poisson(mesh);
    const auto part = partition_structured(mesh, 4, 0);
    Rng r1(6), r2(6);
    TbOptions opts{4, ColumnSelection::Leading, 1e-8, {}};
    const auto plain = tb_sparse(SineBasis(2, 8), mesh, part, *a, opts, r1);
    opts.smoothing_gamma = 2.0 / 3.0;
    const auto smooth = tb_sparse(SineBasis(2, 8), mesh, part, *a, opts, r2);
    const auto grown = grow_overlap(part.nonoverlapping, fem::node_adjacency(mesh), 1);
    const auto pt = smooth.p.transpose();
    std::size_t col = 0;
    for (std::size_t s = 0; s < part.size(); ++s) {
        const std::set<Index> ring(grown[s].begin(), grown[s].end());
        for (std::size_t c = 0; c < smooth.provenance.kept_per_block[s]; ++c, ++col)
            for (Index k = pt.row_ptr()[col]; k < pt.row_ptr()[col + 1]; ++k)
                CHECK(ring.count(pt.col_idx()[k]) == 1);
    }
    CHECK(smooth.p.nnz() > plain.p.nnz());
    // P = (I - gamma D^{-1} A) Pbar.
    const DenseMatrix ad = a->to_dense(), pb = plain.p.to_dense();
    DenseMatrix s(ad.rows(), ad.cols());
    for (std::size_t i = 0; i < ad.rows(); ++i)
        for (std::size_t j = 0; j < ad.cols(); ++j)
            s(i, j) = (i == j ? 1.0 : 0.0) - (2.0 / 3.0) * ad(i, j) / ad(i, i);
    CHECK(oracle::max_abs_diff(smooth.p.to_dense(), oracle::dense_matmul(s, pb)) < 1e-12);
}

TEST_CASE("tb_sparse - blocks with fewer nodes than k shrink") {
    // 16 nodes in four blocks of four; the two end blocks lose the
    // Dirichlet node and keep only three directions.
    const auto mesh = fem::build_mesh(1, 15);
    const auto a = poisson(mesh);
    Rng rng(7);
    const auto pr = tb_sparse(SineBasis(1, 10), mesh, partition_structured(mesh, 4, 0), *a,
                              {8, ColumnSelection::Leading, 1e-8, {}}, rng);
    CHECK(pr.provenance.kept_per_block == std::vector<std::size_t>{3, 4, 4, 3});
}

TEST_CASE("coarse_build - identity prolongation gives the exact inverse") {
    const auto mesh = fem::build_mesh(1, 10);
    const auto a = poisson(mesh);
    Prolongation p{CsrMatrix::identity(a->rows()), {}};
    const auto t = coarse_build(a, p);
    const auto c = make_coarse_preconditioner(t, true, "C");
    CHECK(oracle::max_abs_diff(capture_dense(c), oracle::dense_inverse(a->to_dense())) < 1e-12);
}

TEST_CASE("coarse_build - coarse operator is SPD and the correction annihilates coarse modes") {
    const auto mesh = fem::build_mesh(1, 64);
    const auto a = poisson(mesh);
    Rng rng(8);
    const auto t = coarse_build(a, tb_dense(SineBasis(1, 20), mesh, {6, ColumnSelection::Leading, 1e-8, {}}, rng));
    CHECK(t->coarse_size() == 6);
    CHECK(sym_eig(0.5 * (t->ac + t->ac.transpose())).values.front() > 0.0);
    const DenseMatrix e = error_propagation_dense(*a, make_coarse_preconditioner(t, true, "C"));
    const Vector amp = mode_amplification(e, nodal_sines(mesh, 10));
    for (std::size_t j = 0; j < 6; ++j) CHECK(amp[j] < 1e-10);
    for (std::size_t j = 6; j < 10; ++j) CHECK(amp[j] == doctest::Approx(oracle::vec_norm(nodal_sines(mesh, 10).column(j))));
}

TEST_CASE("coarse_build - two-level cycle damps every mode") {
    const auto mesh = fem::build_mesh(1, 100);
    const auto a = poisson(mesh);
    Rng rng(9);
    const auto t = coarse_build(a, tb_dense(SineBasis(1, 30), mesh, {10, ColumnSelection::Leading, 1e-8, {}}, rng));
    const auto two = make_symmetric_two_level(a, make_jacobi(a), make_coarse_preconditioner(t, true, "C"));
    const DenseMatrix modes = nodal_sines(mesh, 99);
    DenseMatrix unit(modes.rows(), modes.cols());
    for (std::size_t j = 0; j < modes.cols(); ++j) {
        const Vector c = modes.column(j);
        unit.set_column(j, scaled(1.0 / oracle::vec_norm(c), c));
    }
    const Vector amp = mode_amplification(error_propagation_dense(*a, two), unit);
    for (std::size_t j = 0; j < 10; ++j) CHECK(amp[j] < 1e-8);
    for (double x : amp) CHECK(x < 1.0);
}

// ============================================================================
// Direct preconditioning
// ============================================================================

TEST_CASE("sensor interpolation - nodes map to themselves, midpoints average") {
    const auto mesh = fem::build_mesh(2, 4);
    DenseMatrix pts(2, 2);
    pts(0, 0) = 0.25;
    pts(0, 1) = 0.5;
    pts(1, 0) = 0.375;
    pts(1, 1) = 0.5;
    const auto r = sensor_interpolation(mesh, pts);
    CHECK(r.at(0, mesh.node_index(1, 2)) == doctest::Approx(1.0));
    CHECK(r.at(1, mesh.node_index(1, 2)) == doctest::Approx(0.5));
    CHECK(r.at(1, mesh.node_index(2, 2)) == doctest::Approx(0.5));
    DenseMatrix out(1, 2, 0.5);
    out(0, 1) = 1.5;
    CHECK_THROWS_AS(sensor_interpolation(mesh, out), std::out_of_range);
}

TEST_CASE("dp - matching sensor grid restricts v to v / h at interior nodes") {
    const auto mesh = fem::build_mesh(1, 8);
    OnetModel m;
    m.p = 1;
    Branch b;
    b.sensors = uniform_sensor_grid(1, 9);
    b.layers = {dense_layer(9, 1, Activation::None, Vector(9, 1.0), {0.0})};
    m.branches.push_back(b);
    m.trunk = {dense_layer(1, 1, Activation::None, {0.0}, {1.0})};
    const DpContext ctx = make_dp_context(std::make_shared<const OnetModel>(m), mesh, {Vector{}});
    std::mt19937_64 gen(141);
    const Vector v = oracle::random_vector(9, gen);
    Vector scaled_v(9);
    for (std::size_t i = 0; i < 9; ++i) scaled_v[i] = v[i] * ctx.inv_lumped[i];
    const Vector y = spmv(ctx.restriction, scaled_v);
    for (std::size_t i = 1; i < 8; ++i) CHECK(y[i] == doctest::Approx(v[i] * 8.0));
    // Branch sums its inputs, trunk is 1: z = sum_s y_s everywhere.
    Vector e(9, 0.0);
    e[4] = 1.0;
    for (double z : dp_apply(ctx, e)) CHECK(z == doctest::Approx(8.0));
}

TEST_CASE("dp - zero rhs branch gives z = 0 and frozen branches scale the output") {
    const auto mesh = fem::build_mesh(1, 8);
    OnetModel m;
    m.p = 2;
    m.branches.push_back(constant_branch(9, {0.0, 0.0}));
    m.trunk = {dense_layer(1, 2, Activation::None, {1.0, 1.0}, {0.0, 0.0})};
    std::mt19937_64 gen(142);
    const Vector v = oracle::random_vector(9, gen);
    const auto zero = make_dp_context(std::make_shared<const OnetModel>(m), mesh, {Vector{}});
    for (double z : dp_apply(zero, v)) CHECK(z == 0.0);

    // rhs branch 1 outputs (1, 1); frozen branch 0 outputs (2, 3): z = 5 x.
    m.branches[0] = constant_branch(4, {2.0, 3.0});
    m.branches.push_back(constant_branch(9, {1.0, 1.0}));
    m.rhs_branch = 1;
    const auto ctx = make_dp_context(std::make_shared<const OnetModel>(m), mesh, {Vector(4, 0.0), Vector{}});
    const Vector z = dp_apply(ctx, v);
    for (std::size_t i = 0; i < 9; ++i) CHECK(z[i] == doctest::Approx(5.0 * mesh.coords(i, 0)));
    const auto prec = make_dp_preconditioner(std::make_shared<const DpContext>(ctx));
    CHECK_FALSE(prec.linear());
    CHECK_FALSE(prec.spd());
    CHECK(prec.apply(v) == z);
}
