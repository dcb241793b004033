#pragma once

#include <optional>

#include <nlohmann/json.hpp>

#include "shield/dataset.hpp"
#include "shield/nn.hpp"

namespace shield {

struct TrainConfig {
  int epochs = 15;
  int batch_size = 16;
  double learning_rate = 0.02;
  double momentum = 0.9;
  // Learning-rate multiplier applied when fine-tuning from existing params.
  double derivative_lr_scale = 0.2;
  Seed seed = 0;
  // Training images are passed through jpeg_round_trip at this quality.
  std::optional<int> jpeg_quality;
  // Warm start. Set => derivative lineage; unset => fresh He-normal init.
  std::optional<ModelParams> init_from;

  void validate() const;
  nlohmann::ordered_json to_json() const;
};

// He-normal weights, zero biases.
ModelParams init_params(Seed seed, Lineage lineage = Lineage::kBase);

// Minibatch SGD with momentum on cross-entropy. Single-threaded and
// deterministic given cfg.seed. Throws InvalidArgument on an empty dataset.
ModelParams train(const TrainConfig& cfg, const LabeledDataset& dataset);

// Plain argmax accuracy, optionally on jpeg_round_trip(x, q) inputs.
double model_accuracy(const ModelParams& params, const LabeledDataset& dataset,
                      std::optional<int> jpeg_quality = std::nullopt);

// Per layer: flatten the weights and scale to unit length; concatenate the
// layers; return the cosine between the two concatenations. Biases are not
// included.
double weight_cosine_similarity(const ModelParams& a, const ModelParams& b);

// Mean cosine over all unordered pairs.
double mean_pairwise_cosine(std::span<const ModelParams> models);

}  // namespace shield
