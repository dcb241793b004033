#include "shield/slq.hpp"

#include <random>
#include <string>

#include "shield/error.hpp"
#include "shield/jpeg.hpp"

namespace shield {

void SlqConfig::validate() const {
  if (qualities.empty()) throw InvalidArgument("slq: quality list is empty");
  for (std::size_t i = 0; i < qualities.size(); ++i) {
    if (qualities[i] < 1 || qualities[i] > 100) {
      throw InvalidArgument("slq: quality out of range: " + std::to_string(qualities[i]));
    }
    if (i > 0 && qualities[i] <= qualities[i - 1]) {
      throw InvalidArgument("slq: qualities must be strictly increasing");
    }
  }
}

int slq_block_choice(Seed seed, int block_row, int block_col, int quality_count) {
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(block_row), static_cast<std::uint64_t>(block_col)}));
  std::uniform_int_distribution<int> pick(0, quality_count - 1);
  return pick(rng);
}

std::vector<Image> slq_expected_logit_input(const Image& img, const std::vector<int>& qualities) {
  if (qualities.empty()) throw InvalidArgument("slq: quality list is empty");
  std::vector<Image> out;
  out.reserve(qualities.size());
  for (int q : qualities) out.push_back(jpeg_round_trip(img, q));
  return out;
}

SlqResult slq_preprocess(const Image& img, const SlqConfig& cfg) {
  cfg.validate();
  const std::vector<Image> candidates = slq_expected_logit_input(img, cfg.qualities);
  const int quality_count = static_cast<int>(cfg.qualities.size());
  const int blocks_y = (img.height() + kBlockSize - 1) / kBlockSize;
  const int blocks_x = (img.width() + kBlockSize - 1) / kBlockSize;

  SlqResult result;
  result.choices.assign(blocks_y, std::vector<int>(blocks_x, 0));
  Plane mosaic(img.height(), img.width());
  for (int by = 0; by < blocks_y; ++by) {
    for (int bx = 0; bx < blocks_x; ++bx) {
      const int choice = slq_block_choice(cfg.seed, by, bx, quality_count);
      result.choices[by][bx] = choice;
      const Image& source = candidates[choice];
      const int y_end = std::min(img.height(), (by + 1) * kBlockSize);
      const int x_end = std::min(img.width(), (bx + 1) * kBlockSize);
      for (int y = by * kBlockSize; y < y_end; ++y) {
        for (int x = bx * kBlockSize; x < x_end; ++x) mosaic.at(y, x) = source.at(y, x);
      }
    }
  }
  result.image = Image(std::move(mosaic));
  return result;
}

nlohmann::json choice_map_to_json(const ChoiceMap& choices) { return nlohmann::json(choices); }

}  // namespace shield
