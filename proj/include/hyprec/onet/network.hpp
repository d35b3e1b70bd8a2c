#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hyprec/linalg/dense.hpp"

namespace hyprec::onet {

enum class LayerKind { Dense, Conv, Flatten };
enum class Activation { Tanh, Relu, None };

std::string to_string(LayerKind k);
std::string to_string(Activation a);
/// Throw FormatError for unknown names.
LayerKind layer_kind_from_string(const std::string& s);
Activation activation_from_string(const std::string& s);

/// One layer of a feed-forward stack.
///
/// Dense:   shape {in, out}, weight out x in (row-major), bias out; y = W x + b.
/// Conv:    shape {dim, c_in, c_out}, weight c_out x c_in x 3^dim, bias c_out;
///          kernel 3, stride 2, zero padding 1 on every axis.
/// Flatten: no parameters; channel-major order.
struct Layer {
    LayerKind kind = LayerKind::Dense;
    Activation activation = Activation::None;
    std::vector<std::uint64_t> shape;
    Vector weight;
    Vector bias;

    bool operator==(const Layer&) const = default;
};

/// Activation tensor shape: {features} for flat data or {channels, n_1, .., n_dim}.
using TensorShape = std::vector<std::uint64_t>;

/// Output shape of one layer; throws DimensionError when `in` does not fit.
TensorShape layer_output_shape(const Layer& layer, const TensorShape& in);

/// Output shape of a stack; validates parameter counts on the way.
TensorShape stack_output_shape(const std::vector<Layer>& layers, const TensorShape& in);

/// Single-sample forward pass; `x` holds the tensor of shape `in` row-major.
Vector forward(const std::vector<Layer>& layers, const TensorShape& in, std::span<const double> x);

/// Batched forward pass for a stack of Dense layers only; row i of `x` is
/// one sample.
DenseMatrix forward_dense_batch(const std::vector<Layer>& layers, const DenseMatrix& x);

Layer dense_layer(std::size_t in, std::size_t out, Activation act, Vector weight, Vector bias);
Layer conv_layer(int dim, std::size_t c_in, std::size_t c_out, Activation act, Vector weight,
                 Vector bias);
Layer flatten_layer();

} // namespace hyprec::onet
