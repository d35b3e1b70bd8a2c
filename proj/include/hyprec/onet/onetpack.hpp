#pragma once

#include <string>

#include "hyprec/io/container.hpp"
#include "hyprec/onet/model.hpp"

namespace hyprec::onet {

inline constexpr std::uint32_t kOnetPackVersion = 1;

/// Container with magic "ONPK". Manifest:
///   {p, nf, dtype: "f64le", boundary_mask: "none"|"poly",
///    branches: [{layers: [...], sensor_grid: {dim, shape, coords_offset}}],
///    trunk: {layers: [{kind, shape, activation, weight_offset, bias_offset}]},
///    rhs_branch (optional), id (optional)}
/// Offsets are byte offsets into the payload; flatten layers carry null offsets.
io::Bytes encode_model(const OnetModel& m);
/// Validates the result; throws FormatError and never returns a partial model.
OnetModel decode_model(std::span<const std::uint8_t> bytes);

void save_model(const OnetModel& m, const std::string& path);
OnetModel load_model(const std::string& path);

} // namespace hyprec::onet
