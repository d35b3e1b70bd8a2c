#include "hyprec/onet/network.hpp"

#include <algorithm>
#include <cmath>

#include "hyprec/util/errors.hpp"

namespace hyprec::onet {

std::string to_string(LayerKind k) {
    switch (k) {
    case LayerKind::Dense: return "dense";
    case LayerKind::Conv: return "conv";
    case LayerKind::Flatten: return "flatten";
    }
    return "?";
}

std::string to_string(Activation a) {
    switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
    case Activation::None: return "none";
    }
    return "?";
}

LayerKind layer_kind_from_string(const std::string& s) {
    if (s == "dense") return LayerKind::Dense;
    if (s == "conv") return LayerKind::Conv;
    if (s == "flatten") return LayerKind::Flatten;
    throw FormatError("unknown layer kind '" + s + "'");
}

Activation activation_from_string(const std::string& s) {
    if (s == "tanh") return Activation::Tanh;
    if (s == "relu") return Activation::Relu;
    if (s == "none") return Activation::None;
    throw FormatError("unknown activation '" + s + "'");
}

namespace {

std::uint64_t numel(const TensorShape& s) {
    std::uint64_t n = 1;
    for (auto v : s) n *= v;
    return n;
}

std::uint64_t ipow3(std::uint64_t d) {
    std::uint64_t n = 1;
    while (d-- > 0) n *= 3;
    return n;
}

std::uint64_t conv_out(std::uint64_t n) { return (n + 2 - 3) / 2 + 1; }

void activate(Activation act, std::span<double> v) {
    switch (act) {
    case Activation::Tanh:
        for (auto& x : v) x = std::tanh(x);
        break;
    case Activation::Relu:
        for (auto& x : v) x = std::max(0.0, x);
        break;
    case Activation::None: break;
    }
}

Vector conv_forward(const Layer& l, const TensorShape& in, std::span<const double> x) {
    const int dim = static_cast<int>(l.shape[0]);
    const std::size_t c_in = l.shape[1], c_out = l.shape[2];
    std::size_t nin[3] = {1, 1, 1}, nout[3] = {1, 1, 1};
    for (int a = 0; a < dim; ++a) {
        nin[a] = in[1 + a];
        nout[a] = conv_out(in[1 + a]);
    }
    const std::size_t kvol = ipow3(dim);
    const std::size_t in_vol = nin[0] * nin[1] * nin[2];
    const std::size_t out_vol = nout[0] * nout[1] * nout[2];
    Vector y(c_out * out_vol);
    // Index layout is (n_1, .., n_dim) row-major, so the last axis is fastest.
    auto in_index = [&](long i0, long i1, long i2) -> long {
        const long idx[3] = {i0, i1, i2};
        long flat = 0;
        for (int a = 0; a < dim; ++a) {
            if (idx[a] < 0 || idx[a] >= static_cast<long>(nin[a])) return -1;
            flat = flat * static_cast<long>(nin[a]) + idx[a];
        }
        return flat;
    };
    for (std::size_t co = 0; co < c_out; ++co) {
        for (std::size_t o = 0; o < out_vol; ++o) {
            std::size_t rem = o;
            long oi[3] = {0, 0, 0};
            for (int a = dim - 1; a >= 0; --a) {
                oi[a] = static_cast<long>(rem % nout[a]);
                rem /= nout[a];
            }
            double acc = l.bias[co];
            for (std::size_t ci = 0; ci < c_in; ++ci) {
                const double* w = l.weight.data() + (co * c_in + ci) * kvol;
                for (std::size_t kk = 0; kk < kvol; ++kk) {
                    long off[3] = {0, 0, 0};
                    std::size_t r2 = kk;
                    for (int a = dim - 1; a >= 0; --a) {
                        off[a] = static_cast<long>(r2 % 3);
                        r2 /= 3;
                    }
                    const long src = in_index(2 * oi[0] - 1 + off[0], 2 * oi[1] - 1 + off[1],
                                              2 * oi[2] - 1 + off[2]);
                    if (src >= 0) acc += w[kk] * x[ci * in_vol + static_cast<std::size_t>(src)];
                }
            }
            y[co * out_vol + o] = acc;
        }
    }
    return y;
}

} // namespace

TensorShape layer_output_shape(const Layer& l, const TensorShape& in) {
    switch (l.kind) {
    case LayerKind::Dense: {
        if (l.shape.size() != 2) throw DimensionError("dense layer needs shape {in, out}");
        if (in.size() != 1 || in[0] != l.shape[0])
            throw DimensionError("dense layer expects " + std::to_string(l.shape[0]) +
                                 " flat inputs");
        if (l.weight.size() != l.shape[0] * l.shape[1] || l.bias.size() != l.shape[1])
            throw DimensionError("dense layer parameter count mismatch");
        return {l.shape[1]};
    }
    case LayerKind::Conv: {
        if (l.shape.size() != 3 || l.shape[0] < 1 || l.shape[0] > 3)
            throw DimensionError("conv layer needs shape {dim, c_in, c_out} with dim in 1..3");
        const auto dim = l.shape[0];
        if (in.size() != dim + 1 || in[0] != l.shape[1])
            throw DimensionError("conv layer expects " + std::to_string(l.shape[1]) +
                                 " channels on a " + std::to_string(dim) + "D grid");
        if (l.weight.size() != l.shape[1] * l.shape[2] * ipow3(dim) || l.bias.size() != l.shape[2])
            throw DimensionError("conv layer parameter count mismatch");
        TensorShape out{l.shape[2]};
        for (std::size_t a = 0; a < dim; ++a) out.push_back(conv_out(in[1 + a]));
        return out;
    }
    case LayerKind::Flatten:
        if (!l.weight.empty() || !l.bias.empty())
            throw DimensionError("flatten layer has no parameters");
        return {numel(in)};
    }
    throw DimensionError("unknown layer kind");
}

TensorShape stack_output_shape(const std::vector<Layer>& layers, const TensorShape& in) {
    TensorShape s = in;
    for (const auto& l : layers) s = layer_output_shape(l, s);
    return s;
}

Vector forward(const std::vector<Layer>& layers, const TensorShape& in, std::span<const double> x) {
    if (x.size() != numel(in)) throw DimensionError("forward: input size does not match shape");
    TensorShape s = in;
    Vector cur(x.begin(), x.end());
    for (const auto& l : layers) {
        const TensorShape next = layer_output_shape(l, s);
        switch (l.kind) {
        case LayerKind::Dense: {
            Vector y(l.shape[1]);
            kernels::serial::gemv(l.shape[1], l.shape[0], l.weight.data(), cur.data(), y.data());
            for (std::size_t i = 0; i < y.size(); ++i) y[i] += l.bias[i];
            cur = std::move(y);
            break;
        }
        case LayerKind::Conv: cur = conv_forward(l, s, cur); break;
        case LayerKind::Flatten: break;
        }
        activate(l.activation, cur);
        s = next;
    }
    return cur;
}

DenseMatrix forward_dense_batch(const std::vector<Layer>& layers, const DenseMatrix& x) {
    DenseMatrix cur = x;
    TensorShape s{x.cols()};
    for (const auto& l : layers) {
        if (l.kind != LayerKind::Dense)
            throw DimensionError("batched forward supports dense layers only");
        s = layer_output_shape(l, s);
        DenseMatrix wt(l.shape[0], l.shape[1]);
        for (std::size_t o = 0; o < l.shape[1]; ++o)
            for (std::size_t i = 0; i < l.shape[0]; ++i) wt(i, o) = l.weight[o * l.shape[0] + i];
        DenseMatrix y = matmul(cur, wt);
        for (std::size_t r = 0; r < y.rows(); ++r) {
            auto row = y.row(r);
            for (std::size_t o = 0; o < row.size(); ++o) row[o] += l.bias[o];
            activate(l.activation, row);
        }
        cur = std::move(y);
    }
    return cur;
}

Layer dense_layer(std::size_t in, std::size_t out, Activation act, Vector weight, Vector bias) {
    Layer l{LayerKind::Dense, act, {in, out}, std::move(weight), std::move(bias)};
    layer_output_shape(l, {in});
    return l;
}

Layer conv_layer(int dim, std::size_t c_in, std::size_t c_out, Activation act, Vector weight,
                 Vector bias) {
    Layer l{LayerKind::Conv, act, {std::uint64_t(dim), c_in, c_out}, std::move(weight),
            std::move(bias)};
    if (l.weight.size() != c_in * c_out * ipow3(dim) || l.bias.size() != c_out)
        throw DimensionError("conv layer parameter count mismatch");
    return l;
}

Layer flatten_layer() { return Layer{LayerKind::Flatten, Activation::None, {}, {}, {}}; }

} // namespace hyprec::onet
