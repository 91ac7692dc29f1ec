#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "oldn/network/params.hpp"

namespace oldn {

// Checkpoint layout, all integers little-endian:
//   "OLDN" | version u32 | tensor count u32 |
//   per tensor, path-sorted: name length u16 | name | 4 × dim u32 | f32 data
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> serialize_checkpoint(const ModelParams& params);
ModelParams deserialize_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params);
ModelParams load_checkpoint(const std::filesystem::path& path);

// Reconstructs the ModelConfig from parameter names and shapes.
ModelConfig infer_config(const ModelParams::Map& entries);

}  // namespace oldn
