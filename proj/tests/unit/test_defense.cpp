#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "shield/defense.hpp"
#include "shield/error.hpp"
#include "shield/jpeg.hpp"
#include "shield/slq.hpp"

using namespace shield;

namespace {

Logits logits_with(std::initializer_list<std::pair<int, double>> entries) {
  Logits z{};
  for (auto [k, v] : entries) z[k] = v;
  return z;
}

}  // namespace

TEST_CASE("ensemble validation") {
  ShieldEnsemble e;
  CHECK_THROWS_AS(e.validate(), InvalidArgument);
  e.models = {ModelParams::zeros()};
  e.slq.qualities = {};
  CHECK_THROWS_AS(e.validate(), InvalidArgument);
  e.slq.qualities = {50};
  CHECK_NOTHROW(e.validate());
}

TEST_CASE("call seeds depend on every input") {
  const Seed s = derive_call_seed(1, 2, 3);
  CHECK(s == derive_call_seed(1, 2, 3));
  CHECK(s != derive_call_seed(9, 2, 3));
  CHECK(s != derive_call_seed(1, 9, 3));
  CHECK(s != derive_call_seed(1, 2, 9));
}

TEST_CASE("majority vote") {
  SUBCASE("plain majority") {
    const std::vector<Logits> z = {logits_with({{4, 1.0}}), logits_with({{4, 2.0}}), logits_with({{7, 3.0}})};
    const Prediction p = resolve_vote(z);
    CHECK(p.label == 4);
    CHECK(p.tally[4] == 2);
    CHECK(p.tally[7] == 1);
  }
  SUBCASE("two-two split goes to the larger summed softmax") {
    // Members 0-1 barely prefer class 3; members 2-3 are confident in class 2.
    const std::vector<Logits> z = {logits_with({{3, 0.1}}), logits_with({{3, 0.1}}),
                                   logits_with({{2, 6.0}}), logits_with({{2, 6.0}})};
    const Prediction p = resolve_vote(z);
    CHECK(p.tally[3] == 2);
    CHECK(p.tally[2] == 2);
    CHECK(p.label == 2);
  }
  SUBCASE("confidence flipped") {
    const std::vector<Logits> z = {logits_with({{3, 6.0}}), logits_with({{3, 6.0}}),
                                   logits_with({{2, 0.1}}), logits_with({{2, 0.1}})};
    CHECK(resolve_vote(z).label == 3);
  }
  SUBCASE("exact tie on both counts goes to the lowest index") {
    const std::vector<Logits> z = {logits_with({{5, 1.0}, {8, 0.0}}), logits_with({{5, 0.0}, {8, 1.0}})};
    // Member 0 has class 5 ahead of the zeros; member 1 has class 8 ahead.
    CHECK(resolve_vote(z).label == 5);
  }
  CHECK_THROWS_AS(resolve_vote(std::vector<Logits>{}), InvalidArgument);
}

TEST_CASE("vote winners always carry the maximal tally") {
  std::mt19937_64 rng(81);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> members(1, 7);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Logits> z(members(rng));
    for (Logits& l : z) {
      for (double& v : l) v = std::round(n(rng) * 2.0) / 2.0;  // coarse values make ties common
    }
    std::array<int, kClassCount> tally{};
    for (const Logits& l : z) {
      int best = 0;
      for (int k = 1; k < kClassCount; ++k) {
        if (l[k] > l[best]) best = k;
      }
      ++tally[best];
    }
    const Prediction p = resolve_vote(z);
    CHECK(p.tally == tally);
    CHECK(tally[p.label] == *std::max_element(tally.begin(), tally.end()));
  }
}

TEST_CASE("identical members vote unanimously") {
  const auto& zoo = fixture::tiny_zoo();
  const ShieldEnsemble e{{zoo.base, zoo.base, zoo.base}, SlqConfig{kDefaultQualities, 3}};
  for (int i = 0; i < 10; ++i) {
    const Image& x = zoo.eval_set.images[i];
    const Prediction p = shield_predict(e, x, 1000 + i);
    const Image pre = slq_preprocess(x, SlqConfig{kDefaultQualities, static_cast<Seed>(1000 + i)}).image;
    CHECK(p.label == argmax(forward(zoo.base, pre)));
    CHECK(p.tally[p.label] == 3);
  }
}

TEST_CASE("single model and single quality reduce to the codec") {
  const auto& zoo = fixture::tiny_zoo();
  const ShieldEnsemble e{{zoo.derivatives[2]}, SlqConfig{{60}, 3}};
  for (int i = 0; i < 10; ++i) {
    const Image& x = zoo.eval_set.images[i];
    CHECK(shield_predict(e, x, i).label == argmax(forward(zoo.derivatives[2], jpeg_round_trip(x, 60))));
  }
}

TEST_CASE("predictions are deterministic and match a recount") {
  const auto& zoo = fixture::tiny_zoo();
  const ShieldEnsemble& e = zoo.ensemble;
  const std::vector<int> a = shield_predict_all(e, zoo.eval_set.images, 5);
  CHECK(a == shield_predict_all(e, zoo.eval_set.images, 5));

  std::size_t correct = 0;
  for (std::size_t i = 0; i < zoo.eval_set.size(); ++i) {
    const Prediction p = shield_predict(e, zoo.eval_set.images[i], derive_call_seed(e.slq.seed, 5, i));
    CHECK(p.label == a[i]);
    correct += p.label == zoo.eval_set.labels[i];
  }
  const double acc = shield_accuracy(e, zoo.eval_set, 5);
  CHECK(acc == static_cast<double>(correct) / static_cast<double>(zoo.eval_set.size()));
  MESSAGE("tiny ensemble clean accuracy " << acc);
}

TEST_CASE("accuracy edge cases") {
  const auto& zoo = fixture::tiny_zoo();
  const ShieldEnsemble& e = zoo.ensemble;
  const int predicted = shield_predict_all(e, std::span(zoo.eval_set.images.data(), 1), 5)[0];

  LabeledDataset one;
  one.images = {zoo.eval_set.images[0]};
  one.labels = {predicted};
  CHECK(shield_accuracy(e, one, 5) == 1.0);
  one.labels = {(predicted + 1) % kClassCount};
  CHECK(shield_accuracy(e, one, 5) == 0.0);

  CHECK_THROWS_AS(shield_accuracy(e, LabeledDataset{}, 5), InvalidArgument);
}
