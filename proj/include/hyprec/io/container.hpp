#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace hyprec::io {

using Bytes = std::vector<std::uint8_t>;

/// Common binary layout of the model and tensor files:
///   magic[4] | version u32 LE | manifest_len u64 LE | manifest (UTF-8 JSON) | payload
/// Offsets inside the manifest are relative to the start of the payload.
struct Container {
    std::array<char, 4> magic{};
    std::uint32_t version = 1;
    nlohmann::json manifest;
    Bytes payload;
};

/// Manifest keys are emitted sorted, so equal containers encode to equal bytes.
Bytes encode(const Container& c);
/// Throws FormatError on a wrong magic, a truncated header or manifest, or
/// malformed JSON.
Container decode(std::span<const std::uint8_t> bytes, std::array<char, 4> expected_magic);

Bytes read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

/// Little-endian scalar packing independent of the host byte order.
void put_u32(Bytes& out, std::uint32_t v);
void put_u64(Bytes& out, std::uint64_t v);
std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at);
std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t at);

/// Appends `v` as f64le after padding the payload to an 8-byte boundary and
/// returns the offset of the first element.
std::uint64_t append_f64(Bytes& payload, std::span<const double> v);
std::uint64_t append_i64(Bytes& payload, std::span<const std::int64_t> v);
std::uint64_t append_i8(Bytes& payload, std::span<const std::int8_t> v);

/// Reads `count` elements at `offset`; FormatError when out of range.
std::vector<double> read_f64(std::span<const std::uint8_t> payload, std::uint64_t offset,
                             std::uint64_t count);
std::vector<std::int64_t> read_i64(std::span<const std::uint8_t> payload, std::uint64_t offset,
                                   std::uint64_t count);
std::vector<std::int8_t> read_i8(std::span<const std::uint8_t> payload, std::uint64_t offset,
                                 std::uint64_t count);

} // namespace hyprec::io
