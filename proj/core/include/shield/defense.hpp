#pragma once

#include <array>
#include <span>
#include <vector>

#include "shield/dataset.hpp"
#include "shield/nn.hpp"
#include "shield/slq.hpp"

namespace shield {

// SLQ pre-processing followed by a majority vote over JPEG-trained models.
struct ShieldEnsemble {
  std::vector<ModelParams> models;
  SlqConfig slq;  // slq.seed is the ensemble seed

  void validate() const;
};

// SLQ seed for one prediction call, derived from the ensemble's own seed,
// the evaluation seed, and the image index.
Seed derive_call_seed(Seed ensemble_seed, Seed eval_seed, std::size_t image_index);

struct Prediction {
  int label = 0;
  std::array<int, kClassCount> tally{};
};

// Majority vote over member argmaxes. Ties on tally go to the class with the
// highest softmax mass summed over members, then to the lowest index.
Prediction resolve_vote(std::span<const Logits> member_logits);

Prediction shield_predict(const ShieldEnsemble& e, const Image& img, Seed call_seed);

// Predictions for a list of images; image i uses
// derive_call_seed(e.slq.seed, seed, i).
std::vector<int> shield_predict_all(const ShieldEnsemble& e, std::span<const Image> images, Seed seed);

double shield_accuracy(const ShieldEnsemble& e, const LabeledDataset& dataset, Seed seed);

}  // namespace shield
