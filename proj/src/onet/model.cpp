#include "hyprec/onet/model.hpp"

#include "hyprec/util/errors.hpp"

namespace hyprec::onet {

std::size_t SensorGrid::size() const {
    std::size_t n = 1;
    for (auto s : shape) n *= s;
    return shape.empty() ? 0 : n;
}

SensorGrid uniform_sensor_grid(int dim, std::size_t per_axis) {
    if (dim < 1 || dim > 3 || per_axis < 2)
        throw std::invalid_argument("uniform_sensor_grid: need dim in 1..3 and >= 2 points");
    SensorGrid g;
    g.dim = dim;
    g.shape.assign(dim, per_axis);
    const std::size_t n = g.size();
    g.coords = DenseMatrix(n, dim);
    const double h = 1.0 / static_cast<double>(per_axis - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rem = i;
        for (int a = 0; a < dim; ++a) {
            const std::size_t ia = rem % per_axis;
            rem /= per_axis;
            g.coords(i, a) = ia + 1 == per_axis ? 1.0 : static_cast<double>(ia) * h;
        }
    }
    return g;
}

int OnetModel::trunk_dim() const {
    if (trunk.empty() || trunk.front().kind != LayerKind::Dense) return 0;
    return static_cast<int>(trunk.front().shape.at(0));
}

TensorShape branch_input_shape(const Branch& b) {
    if (!b.layers.empty() && b.layers.front().kind == LayerKind::Conv) {
        TensorShape s{1};
        s.insert(s.end(), b.sensors.shape.begin(), b.sensors.shape.end());
        return s;
    }
    return {b.sensors.size()};
}

void validate(const OnetModel& m) {
    auto finite = [](const std::vector<Layer>& layers, const std::string& where) {
        for (const auto& l : layers)
            if (!all_finite(l.weight) || !all_finite(l.bias))
                throw FormatError(where + ": non-finite weights");
    };
    if (m.p == 0) throw FormatError("model: p must be positive");
    if (m.branches.empty()) throw FormatError("model: at least one branch required");
    try {
        for (std::size_t l = 0; l < m.branches.size(); ++l) {
            const auto& b = m.branches[l];
            const std::string where = "branch " + std::to_string(l);
            if (b.sensors.size() == 0) throw FormatError(where + ": empty sensor grid");
            if (b.sensors.dim > 0 && (b.sensors.coords.rows() != b.sensors.size() ||
                                      b.sensors.coords.cols() != std::size_t(b.sensors.dim) ||
                                      b.sensors.shape.size() != std::size_t(b.sensors.dim)))
                throw FormatError(where + ": sensor coordinates do not match the grid shape");
            const auto out = stack_output_shape(b.layers, branch_input_shape(b));
            if (out.size() != 1 || out[0] != m.p)
                throw FormatError(where + ": output width differs from p=" + std::to_string(m.p));
            finite(b.layers, where);
        }
        const int d = m.trunk_dim();
        if (d < 1 || d > 3) throw FormatError("trunk: first layer must be dense with 1..3 inputs");
        for (const auto& l : m.trunk)
            if (l.kind != LayerKind::Dense) throw FormatError("trunk: only dense layers supported");
        const auto out = stack_output_shape(m.trunk, {std::uint64_t(d)});
        if (out[0] != m.p) throw FormatError("trunk: output width differs from p");
        finite(m.trunk, "trunk");
    } catch (const DimensionError& e) {
        throw FormatError(std::string("model shape chain: ") + e.what());
    }
    if (m.rhs_branch && *m.rhs_branch >= m.branches.size())
        throw FormatError("model: rhs_branch out of range");
}

double poly_mask(std::span<const double> x) {
    double b = 1.0;
    for (double xi : x) b *= 4.0 * xi * (1.0 - xi);
    return b;
}

DenseMatrix trunk_eval(const OnetModel& m, const DenseMatrix& points) {
    if (static_cast<int>(points.cols()) != m.trunk_dim())
        throw DimensionError("trunk_eval: points have " + std::to_string(points.cols()) +
                             " coordinates, trunk expects " + std::to_string(m.trunk_dim()));
    DenseMatrix t = forward_dense_batch(m.trunk, points);
    if (m.boundary_mask == BoundaryMask::Poly) {
        for (std::size_t j = 0; j < t.rows(); ++j) {
            const double b = poly_mask(points.row(j));
            for (auto& v : t.row(j)) v *= b;
        }
    }
    return t;
}

Vector branch_eval(const OnetModel& m, std::size_t l, std::span<const double> input) {
    if (l >= m.branches.size()) throw DimensionError("branch index out of range");
    const auto& b = m.branches[l];
    if (input.size() != b.sensors.size())
        throw DimensionError("branch " + std::to_string(l) + " expects " +
                             std::to_string(b.sensors.size()) + " inputs, got " +
                             std::to_string(input.size()));
    return forward(b.layers, branch_input_shape(b), input);
}

Vector contract(const DenseMatrix& trunk_rows, std::span<const double> coeff) {
    if (trunk_rows.cols() != coeff.size()) throw DimensionError("contract: width mismatch");
    return matvec(trunk_rows, coeff);
}

Vector infer(const OnetModel& m, const std::vector<Vector>& inputs, const DenseMatrix& points) {
    if (inputs.size() != m.nf())
        throw DimensionError("infer: model has " + std::to_string(m.nf()) + " branches, got " +
                             std::to_string(inputs.size()) + " inputs");
    Vector coeff(m.p, 1.0);
    for (std::size_t l = 0; l < m.nf(); ++l) {
        const Vector b = branch_eval(m, l, inputs[l]);
        for (std::size_t k = 0; k < m.p; ++k) coeff[k] *= b[k];
    }
    return contract(trunk_eval(m, points), coeff);
}

} // namespace hyprec::onet
