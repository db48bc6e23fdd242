#pragma once

#include <cstdint>
#include <string>

#include "relret/param_set.hpp"

namespace relret {

/// Self-describing parameter snapshot. Byte layout (all integers and float
/// bit patterns little-endian):
///   magic "RRCP" | u32 format_version | u64 config_len | config bytes (JSON)
///   | u64 seed | u64 step | u64 tensor_count
///   | per tensor: u32 name_len | name bytes | u64 rows | u64 cols
///   | rows*cols f64 values
/// Round trips are bit-exact.
struct Checkpoint {
    std::uint32_t format_version = 1;
    std::string config_json;
    std::uint64_t seed = 0;
    std::uint64_t step = 0;
    ParamSet params;
};

void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

} // namespace relret
