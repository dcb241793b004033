#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "shield/error.hpp"
#include "shield/jpeg.hpp"
#include "shield/slq.hpp"

using namespace shield;

namespace {

// Index of the candidate whose block (by, bx) equals out's, bit for bit.
std::vector<int> matching_candidates(const Image& out, const std::vector<Image>& candidates, int by, int bx) {
  std::vector<int> hits;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    bool same = true;
    for (int y = by * 8; y < std::min(out.height(), by * 8 + 8) && same; ++y) {
      for (int x = bx * 8; x < std::min(out.width(), bx * 8 + 8); ++x) {
        if (out.at(y, x) != candidates[k].at(y, x)) {
          same = false;
          break;
        }
      }
    }
    if (same) hits.push_back(static_cast<int>(k));
  }
  return hits;
}

}  // namespace

TEST_CASE("SlqConfig validation") {
  SlqConfig cfg;
  CHECK(cfg.qualities == std::vector<int>{20, 40, 60, 80});
  CHECK_NOTHROW(cfg.validate());
  cfg.qualities = {};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.qualities = {40, 20};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.qualities = {20, 20};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.qualities = {0, 20};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.qualities = {20, 101};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("single-quality SLQ equals the codec") {
  std::mt19937_64 rng(41);
  const Image img = oracle::random_image(32, 32, rng);
  SlqConfig cfg{{80}, 5};
  const SlqResult r = slq_preprocess(img, cfg);
  CHECK(r.image == jpeg_round_trip(img, 80));
  for (const auto& row : r.choices) {
    for (int c : row) CHECK(c == 0);
  }
}

TEST_CASE("every SLQ block is copied from the candidate its choice names") {
  std::mt19937_64 rng(42);
  for (Seed seed = 1; seed <= 5; ++seed) {
    for (int i = 0; i < 50; ++i) {
      const int h = i % 5 == 0 ? 27 : 32;
      const Image img = oracle::random_image(h, 32, rng);
      const SlqConfig cfg{kDefaultQualities, seed * 1000 + static_cast<Seed>(i)};
      const SlqResult r = slq_preprocess(img, cfg);
      const auto candidates = slq_expected_logit_input(img, cfg.qualities);
      REQUIRE(r.choices.size() == static_cast<std::size_t>((h + 7) / 8));
      for (int by = 0; by < static_cast<int>(r.choices.size()); ++by) {
        REQUIRE(r.choices[by].size() == 4);
        for (int bx = 0; bx < 4; ++bx) {
          const auto hits = matching_candidates(r.image, candidates, by, bx);
          REQUIRE(!hits.empty());
          CHECK(std::find(hits.begin(), hits.end(), r.choices[by][bx]) != hits.end());
        }
      }
    }
  }
}

TEST_CASE("SLQ is deterministic in its seed") {
  std::mt19937_64 rng(43);
  const Image img = oracle::random_image(32, 32, rng);
  const SlqResult a = slq_preprocess(img, {kDefaultQualities, 77});
  const SlqResult b = slq_preprocess(img, {kDefaultQualities, 77});
  CHECK(a.image == b.image);
  CHECK(a.choices == b.choices);
  // 16 blocks, so an exact collision has probability 4^-16.
  const SlqResult c = slq_preprocess(img, {kDefaultQualities, 78});
  CHECK(a.choices != c.choices);
}

TEST_CASE("block choices are uniform within three sigma") {
  const int k = 4;
  std::array<int, 4> counts{};
  for (int by = 0; by < 100; ++by) {
    for (int bx = 0; bx < 100; ++bx) {
      const int c = slq_block_choice(2024, by, bx, k);
      REQUIRE(c >= 0);
      REQUIRE(c < k);
      ++counts[c];
    }
  }
  const double n = 10000.0, p = 1.0 / k;
  const double sigma = std::sqrt(n * p * (1 - p));
  for (int c : counts) CHECK(std::abs(c - n * p) <= 3 * sigma);
}

TEST_CASE("slq_expected_logit_input") {
  std::mt19937_64 rng(44);
  const Image img = oracle::random_image(16, 24, rng);
  const auto outs = slq_expected_logit_input(img, kDefaultQualities);
  REQUIRE(outs.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(outs[i] == jpeg_round_trip(img, kDefaultQualities[i]));
  CHECK_THROWS_AS(slq_expected_logit_input(img, {}), InvalidArgument);

  // A constant image only carries a DC term, quantized to within half a step.
  const Image flat(16, 16, 0.4);
  const auto flats = slq_expected_logit_input(flat, kDefaultQualities);
  for (std::size_t i = 0; i < 4; ++i) {
    const double step = quality_to_table(kDefaultQualities[i]).entries[0] / 8.0 / 255.0;
    CHECK(linf_distance(flats[i], flat) <= 0.5 * step + 1.0 / 255.0);
  }
}

TEST_CASE("choice map serializes as nested arrays") {
  const ChoiceMap m = {{0, 1}, {3, 2}};
  CHECK(choice_map_to_json(m).dump() == "[[0,1],[3,2]]");
}
