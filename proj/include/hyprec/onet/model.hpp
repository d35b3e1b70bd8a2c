#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hyprec/onet/network.hpp"

namespace hyprec::onet {

enum class BoundaryMask { None, Poly };

/// Points where a branch samples its input function. `dim == 0` marks a
/// plain parameter vector (e.g. a source location) without coordinates.
struct SensorGrid {
    int dim = 0;
    std::vector<std::uint64_t> shape; ///< points per axis, or {length} when dim == 0
    DenseMatrix coords;               ///< numel(shape) x dim, row-major over the grid

    std::size_t size() const;
    bool operator==(const SensorGrid&) const = default;
};

/// Uniform sensor grid on [0,1]^dim with `per_axis` points per axis,
/// ordered with the first axis fastest (matching the mesh node order).
SensorGrid uniform_sensor_grid(int dim, std::size_t per_axis);

struct Branch {
    std::vector<Layer> layers;
    SensorGrid sensors;
    bool operator==(const Branch&) const = default;
};

/// Multi-input DeepONet: G(y^1, .., y^nf)(x) = sum_k B^1_k ... B^nf_k T_k(x).
struct OnetModel {
    std::size_t p = 0;
    std::vector<Branch> branches;
    std::vector<Layer> trunk;
    BoundaryMask boundary_mask = BoundaryMask::None;
    /// Branch that receives the residual in direct preconditioning.
    std::optional<std::size_t> rhs_branch;
    std::string id;

    std::size_t nf() const { return branches.size(); }
    int trunk_dim() const;
    bool operator==(const OnetModel&) const = default;
};

/// Shape chain, widths, sensor sizes and finiteness. Throws FormatError.
void validate(const OnetModel& m);

/// Input tensor shape of a branch: {numel} for a dense head, {1, n_1, ..} for a conv head.
TensorShape branch_input_shape(const Branch& b);

/// b(x) = prod_i 4 x_i (1 - x_i).
double poly_mask(std::span<const double> x);

/// Trunk outputs at `points` (n x d), one row per point, times b(x_j) when
/// the model is masked.
DenseMatrix trunk_eval(const OnetModel& m, const DenseMatrix& points);

/// Output vector (length p) of branch `l`.
Vector branch_eval(const OnetModel& m, std::size_t l, std::span<const double> input);

/// Operator value at every point.
Vector infer(const OnetModel& m, const std::vector<Vector>& inputs, const DenseMatrix& points);

/// Contracts branch products `coeff` (length p) with precomputed trunk rows.
Vector contract(const DenseMatrix& trunk_rows, std::span<const double> coeff);

} // namespace hyprec::onet
