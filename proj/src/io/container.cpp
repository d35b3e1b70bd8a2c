#include "hyprec/io/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "hyprec/util/errors.hpp"

namespace hyprec::io {

void put_u32(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(Bytes& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
    if (at + 4 > in.size()) throw FormatError("truncated: u32 past end of data");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(in[at + i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t at) {
    if (at + 8 > in.size()) throw FormatError("truncated: u64 past end of data");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(in[at + i]) << (8 * i);
    return v;
}

Bytes encode(const Container& c) {
    const std::string manifest = c.manifest.dump();
    Bytes out;
    out.reserve(16 + manifest.size() + c.payload.size());
    out.insert(out.end(), c.magic.begin(), c.magic.end());
    put_u32(out, c.version);
    put_u64(out, manifest.size());
    out.insert(out.end(), manifest.begin(), manifest.end());
    out.insert(out.end(), c.payload.begin(), c.payload.end());
    return out;
}

Container decode(std::span<const std::uint8_t> bytes, std::array<char, 4> expected_magic) {
    if (bytes.size() < 16) throw FormatError("truncated: header needs 16 bytes");
    Container c;
    std::memcpy(c.magic.data(), bytes.data(), 4);
    if (c.magic != expected_magic)
        throw FormatError("bad magic: expected '" + std::string(expected_magic.data(), 4) + "'");
    c.version = get_u32(bytes, 4);
    const std::uint64_t len = get_u64(bytes, 8);
    if (len > bytes.size() - 16) throw FormatError("truncated: manifest extends past end of file");
    const auto* begin = reinterpret_cast<const char*>(bytes.data() + 16);
    try {
        c.manifest = nlohmann::json::parse(begin, begin + len);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("manifest is not valid JSON: ") + e.what());
    }
    c.payload.assign(bytes.begin() + 16 + static_cast<std::ptrdiff_t>(len), bytes.end());
    return c;
}

Bytes read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'");
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write '" + path + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("write failed for '" + path + "'");
}

namespace {

void align8(Bytes& payload) {
    while (payload.size() % 8 != 0) payload.push_back(0);
}

void check_range(std::span<const std::uint8_t> payload, std::uint64_t offset, std::uint64_t count,
                 std::uint64_t width) {
    if (count > (payload.size() / width) + 1 || offset > payload.size() ||
        count * width > payload.size() - offset)
        throw FormatError("truncated: tensor at offset " + std::to_string(offset) +
                          " extends past end of payload");
}

} // namespace

std::uint64_t append_f64(Bytes& payload, std::span<const double> v) {
    align8(payload);
    const std::uint64_t at = payload.size();
    for (double x : v) put_u64(payload, std::bit_cast<std::uint64_t>(x));
    return at;
}

std::uint64_t append_i64(Bytes& payload, std::span<const std::int64_t> v) {
    align8(payload);
    const std::uint64_t at = payload.size();
    for (auto x : v) put_u64(payload, static_cast<std::uint64_t>(x));
    return at;
}

std::uint64_t append_i8(Bytes& payload, std::span<const std::int8_t> v) {
    align8(payload);
    const std::uint64_t at = payload.size();
    for (auto x : v) payload.push_back(static_cast<std::uint8_t>(x));
    return at;
}

std::vector<double> read_f64(std::span<const std::uint8_t> payload, std::uint64_t offset,
                             std::uint64_t count) {
    check_range(payload, offset, count, 8);
    std::vector<double> out(count);
    for (std::uint64_t i = 0; i < count; ++i)
        out[i] = std::bit_cast<double>(get_u64(payload, offset + 8 * i));
    return out;
}

std::vector<std::int64_t> read_i64(std::span<const std::uint8_t> payload, std::uint64_t offset,
                                   std::uint64_t count) {
    check_range(payload, offset, count, 8);
    std::vector<std::int64_t> out(count);
    for (std::uint64_t i = 0; i < count; ++i)
        out[i] = static_cast<std::int64_t>(get_u64(payload, offset + 8 * i));
    return out;
}

std::vector<std::int8_t> read_i8(std::span<const std::uint8_t> payload, std::uint64_t offset,
                                 std::uint64_t count) {
    check_range(payload, offset, count, 1);
    std::vector<std::int8_t> out(count);
    for (std::uint64_t i = 0; i < count; ++i) out[i] = static_cast<std::int8_t>(payload[offset + i]);
    return out;
}

} // namespace hyprec::io
