#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "hyprec/io/container.hpp"

namespace hyprec::io {

enum class DType { F64, I64, I8 };

std::string to_string(DType d); ///< "f64le", "i64le", "i8"
DType dtype_from_string(const std::string& s);

struct Tensor {
    std::string name;
    std::vector<std::uint64_t> shape;
    std::variant<std::vector<double>, std::vector<std::int64_t>, std::vector<std::int8_t>> data;

    DType dtype() const { return static_cast<DType>(data.index()); }
    std::uint64_t numel() const;
    bool operator==(const Tensor&) const = default;
};

/// Named tensors in insertion order plus free-form metadata. Encoded as a
/// container with magic "TPK0"; the manifest is
/// {"meta": {...}, "tensors": [{"name", "dtype", "shape", "offset"}, ...]}.
class TensorPack {
public:
    static constexpr std::uint32_t kVersion = 1;

    void add(Tensor t);
    void add_f64(const std::string& name, std::vector<std::uint64_t> shape, std::vector<double> v);
    void add_i64(const std::string& name, std::vector<std::uint64_t> shape,
                 std::vector<std::int64_t> v);
    void add_i8(const std::string& name, std::vector<std::uint64_t> shape, std::vector<std::int8_t> v);

    bool contains(const std::string& name) const;
    const Tensor& get(const std::string& name) const;
    const std::vector<double>& f64(const std::string& name) const;
    const std::vector<std::int64_t>& i64(const std::string& name) const;
    const std::vector<std::int8_t>& i8(const std::string& name) const;

    const std::vector<Tensor>& tensors() const { return tensors_; }
    nlohmann::json& meta() { return meta_; }
    const nlohmann::json& meta() const { return meta_; }

    Bytes encode() const;
    /// Throws FormatError on bad magic, version, dtype, shape or truncation.
    static TensorPack decode(std::span<const std::uint8_t> bytes);

    void save(const std::string& path) const;
    static TensorPack load(const std::string& path);

private:
    std::vector<Tensor> tensors_;
    nlohmann::json meta_ = nlohmann::json::object();
};

} // namespace hyprec::io
