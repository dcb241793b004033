#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "shield/image.hpp"
#include "shield/rng.hpp"

namespace shield {

enum class Split { kTrain, kEval };

const char* to_string(Split split);

struct LabeledDataset {
  std::vector<Image> images;
  std::vector<int> labels;
  Split split = Split::kTrain;

  std::size_t size() const noexcept { return images.size(); }
  bool empty() const noexcept { return images.empty(); }
  // Throws InvalidArgument on length mismatch or label outside [0,9].
  void validate() const;
};

// Ten procedural 32x32 pattern families:
//   0-3 gratings at 0/45/90/135 degrees, 4-5 disks of two radii,
//   6-7 checkerboards of two cell sizes, 8-9 bright/dark-centered radial
//   gradients.
// Each sample jitters phase/position and contrast and adds gaussian noise
// (sigma 0.05) before clamping. Labels cycle 0..9 so classes are balanced up
// to the remainder.
LabeledDataset generate_synthetic(int count, Seed seed, Split split);

// ADVD container: "ADVD", version 0x01, u32 count, u16 height, u16 width,
// u8 channels (=1), then per record u8 label and height*width pixel bytes
// round(v*255). All integers little-endian.
std::vector<std::uint8_t> encode_container(const LabeledDataset& ds);
LabeledDataset decode_container(std::span<const std::uint8_t> bytes, Split split = Split::kEval);

void write_container(const LabeledDataset& ds, const std::filesystem::path& path);
LabeledDataset read_container(const std::filesystem::path& path, Split split = Split::kEval);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace shield
