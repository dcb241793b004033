#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "shield/image.hpp"
#include "shield/rng.hpp"

namespace shield {

inline const std::vector<int> kDefaultQualities = {20, 40, 60, 80};

// Stochastic Local Quantization parameters.
struct SlqConfig {
  std::vector<int> qualities = kDefaultQualities;  // nonempty, strictly increasing
  Seed seed = 0;

  // Throws InvalidArgument when the quality list is empty, unsorted, or out
  // of [1,100].
  void validate() const;
};

// Chosen quality index per 8x8 block, indexed [block_row][block_col].
using ChoiceMap = std::vector<std::vector<int>>;

struct SlqResult {
  Image image;
  ChoiceMap choices;
};

// Compresses img at every configured quality and stitches a mosaic whose
// blocks are copied verbatim from a uniformly drawn source. The draw for
// block (by, bx) depends only on (seed, by, bx).
SlqResult slq_preprocess(const Image& img, const SlqConfig& cfg);

// Index drawn for one block position; exposed for frequency tests.
int slq_block_choice(Seed seed, int block_row, int block_col, int quality_count);

// The deterministic stand-ins the adaptive attacker averages over: one
// jpeg_round_trip per quality. Throws InvalidArgument on an empty list.
std::vector<Image> slq_expected_logit_input(const Image& img, const std::vector<int>& qualities);

nlohmann::json choice_map_to_json(const ChoiceMap& choices);

}  // namespace shield
