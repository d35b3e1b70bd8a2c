#include "hyprec/io/tensorpack.hpp"

#include <stdexcept>

#include "hyprec/util/errors.hpp"

namespace hyprec::io {

namespace {
constexpr std::array<char, 4> kMagic{'T', 'P', 'K', '0'};

std::uint64_t product(const std::vector<std::uint64_t>& shape) {
    std::uint64_t n = 1;
    for (auto s : shape) n *= s;
    return n;
}
} // namespace

std::string to_string(DType d) {
    switch (d) {
    case DType::F64: return "f64le";
    case DType::I64: return "i64le";
    case DType::I8: return "i8";
    }
    return "?";
}

DType dtype_from_string(const std::string& s) {
    if (s == "f64le") return DType::F64;
    if (s == "i64le") return DType::I64;
    if (s == "i8") return DType::I8;
    throw FormatError("unknown dtype '" + s + "'");
}

std::uint64_t Tensor::numel() const {
    return std::visit([](const auto& v) { return static_cast<std::uint64_t>(v.size()); }, data);
}

void TensorPack::add(Tensor t) {
    if (contains(t.name)) throw std::invalid_argument("duplicate tensor '" + t.name + "'");
    if (product(t.shape) != t.numel())
        throw DimensionError("tensor '" + t.name + "': shape does not match element count");
    tensors_.push_back(std::move(t));
}

void TensorPack::add_f64(const std::string& name, std::vector<std::uint64_t> shape,
                         std::vector<double> v) {
    add({name, std::move(shape), std::move(v)});
}

void TensorPack::add_i64(const std::string& name, std::vector<std::uint64_t> shape,
                         std::vector<std::int64_t> v) {
    add({name, std::move(shape), std::move(v)});
}

void TensorPack::add_i8(const std::string& name, std::vector<std::uint64_t> shape,
                        std::vector<std::int8_t> v) {
    add({name, std::move(shape), std::move(v)});
}

bool TensorPack::contains(const std::string& name) const {
    for (const auto& t : tensors_)
        if (t.name == name) return true;
    return false;
}

const Tensor& TensorPack::get(const std::string& name) const {
    for (const auto& t : tensors_)
        if (t.name == name) return t;
    throw std::out_of_range("no tensor named '" + name + "'");
}

const std::vector<double>& TensorPack::f64(const std::string& name) const {
    const auto* v = std::get_if<std::vector<double>>(&get(name).data);
    if (!v) throw FormatError("tensor '" + name + "' is not f64le");
    return *v;
}

const std::vector<std::int64_t>& TensorPack::i64(const std::string& name) const {
    const auto* v = std::get_if<std::vector<std::int64_t>>(&get(name).data);
    if (!v) throw FormatError("tensor '" + name + "' is not i64le");
    return *v;
}

const std::vector<std::int8_t>& TensorPack::i8(const std::string& name) const {
    const auto* v = std::get_if<std::vector<std::int8_t>>(&get(name).data);
    if (!v) throw FormatError("tensor '" + name + "' is not i8");
    return *v;
}

Bytes TensorPack::encode() const {
    Container c;
    c.magic = kMagic;
    c.version = kVersion;
    auto entries = nlohmann::json::array();
    for (const auto& t : tensors_) {
        std::uint64_t offset = 0;
        std::visit(
            [&](const auto& v) {
                using T = typename std::decay_t<decltype(v)>::value_type;
                if constexpr (std::is_same_v<T, double>)
                    offset = append_f64(c.payload, v);
                else if constexpr (std::is_same_v<T, std::int64_t>)
                    offset = append_i64(c.payload, v);
                else
                    offset = append_i8(c.payload, v);
            },
            t.data);
        entries.push_back({{"name", t.name},
                           {"dtype", to_string(t.dtype())},
                           {"shape", t.shape},
                           {"offset", offset}});
    }
    c.manifest = {{"meta", meta_}, {"tensors", entries}};
    return io::encode(c);
}

TensorPack TensorPack::decode(std::span<const std::uint8_t> bytes) {
    const Container c = io::decode(bytes, kMagic);
    if (c.version != kVersion)
        throw FormatError("unsupported TensorPack version " + std::to_string(c.version));
    TensorPack pack;
    try {
        if (c.manifest.contains("meta")) pack.meta_ = c.manifest.at("meta");
        for (const auto& e : c.manifest.at("tensors")) {
            Tensor t;
            t.name = e.at("name").get<std::string>();
            t.shape = e.at("shape").get<std::vector<std::uint64_t>>();
            const auto offset = e.at("offset").get<std::uint64_t>();
            const auto n = product(t.shape);
            switch (dtype_from_string(e.at("dtype").get<std::string>())) {
            case DType::F64: t.data = read_f64(c.payload, offset, n); break;
            case DType::I64: t.data = read_i64(c.payload, offset, n); break;
            case DType::I8: t.data = read_i8(c.payload, offset, n); break;
            }
            pack.add(std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed TensorPack manifest: ") + e.what());
    }
    return pack;
}

void TensorPack::save(const std::string& path) const { write_file(path, encode()); }

TensorPack TensorPack::load(const std::string& path) { return decode(read_file(path)); }

} // namespace hyprec::io
