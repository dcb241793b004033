#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "shield/nn.hpp"

namespace shield {

inline constexpr char kCheckpointMagic[] = "SHLDMDL1";

// "SHLDMDL1", u32 little-endian header length, JSON header
// {spec, lineage, train_quality, seed}, then every parameter tensor as
// little-endian f64 in declaration order.
std::vector<std::uint8_t> encode_checkpoint(const ModelParams& params);
ModelParams decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace shield
