#include "shield/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "nn_kernels.hpp"
#include "shield/error.hpp"
#include "shield/jpeg.hpp"

namespace shield {

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw InvalidArgument("train: learning_rate must be >= 0");
  if (batch_size < 1) throw InvalidArgument("train: batch_size must be >= 1");
  if (epochs < 0) throw InvalidArgument("train: epochs must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidArgument("train: momentum must be in [0,1)");
  if (!(derivative_lr_scale > 0.0)) throw InvalidArgument("train: derivative_lr_scale must be > 0");
  if (jpeg_quality && (*jpeg_quality < 1 || *jpeg_quality > 100)) {
    throw InvalidArgument("train: jpeg_quality out of range");
  }
  if (init_from) init_from->validate();
}

nlohmann::ordered_json TrainConfig::to_json() const {
  nlohmann::ordered_json j;
  j["epochs"] = epochs;
  j["batch_size"] = batch_size;
  j["learning_rate"] = learning_rate;
  j["momentum"] = momentum;
  j["derivative_lr_scale"] = derivative_lr_scale;
  j["seed"] = seed;
  j["jpeg_quality"] = jpeg_quality ? nlohmann::ordered_json(*jpeg_quality) : nlohmann::ordered_json(nullptr);
  j["init"] = init_from ? "from_params" : "random";
  return j;
}

ModelParams init_params(Seed seed, Lineage lineage) {
  ModelParams p = ModelParams::zeros();
  p.lineage = lineage;
  p.seed = seed;
  Rng rng(seed);
  auto fill = [&](std::vector<double>& w, int fan_in) {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
    for (double& v : w) v = dist(rng);
  };
  fill(p.weights.conv1_w, 9);
  fill(p.weights.conv2_w, 9 * nn_detail::kC1);
  fill(p.weights.dense_w, nn_detail::kFeatures);
  return p;
}

ModelParams train(const TrainConfig& cfg, const LabeledDataset& dataset) {
  cfg.validate();
  dataset.validate();
  if (dataset.empty()) throw InvalidArgument("train: dataset is empty");

  std::vector<Image> inputs;
  inputs.reserve(dataset.size());
  for (const Image& img : dataset.images) {
    if (img.height() != kInputSide || img.width() != kInputSide) throw InvalidArgument("train: images must be 32x32");
    // jpeg_round_trip is deterministic, so compressing once equals compressing before every use.
    inputs.push_back(cfg.jpeg_quality ? jpeg_round_trip(img, *cfg.jpeg_quality) : img);
  }

  ModelParams params;
  double lr = cfg.learning_rate;
  if (cfg.init_from) {
    params = *cfg.init_from;
    params.lineage = Lineage::kDerivative;
    lr *= cfg.derivative_lr_scale;
  } else {
    params = init_params(derive_seed(cfg.seed, {0}), cfg.jpeg_quality ? Lineage::kOriginative : Lineage::kBase);
  }
  params.train_quality = cfg.jpeg_quality;
  params.seed = cfg.seed;

  ParamTensors velocity = ParamTensors::zeros(params.spec);
  ParamTensors grads = ParamTensors::zeros(params.spec);
  nn_detail::Workspace ws;
  Rng order_rng(derive_seed(cfg.seed, {1}));
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      for (auto t : grads.tensors()) std::fill(t.begin(), t.end(), 0.0);
      for (std::size_t i = start; i < end; ++i) {
        const std::size_t idx = order[i];
        const double* x = inputs[idx].pixels().data();
        nn_detail::forward_pass(params.weights, x, ws);
        const LossResult loss = cross_entropy_loss(ws.logits, dataset.labels[idx]);
        nn_detail::backward_pass(params.weights, x, ws, loss.grad, &grads, nullptr);
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      auto w = params.weights.tensors();
      auto v = velocity.tensors();
      auto g = grads.tensors();
      for (std::size_t t = 0; t < w.size(); ++t) {
        for (std::size_t k = 0; k < w[t].size(); ++k) {
          v[t][k] = cfg.momentum * v[t][k] + g[t][k] * inv;
          w[t][k] -= lr * v[t][k];
        }
      }
    }
  }
  return params;
}

double model_accuracy(const ModelParams& params, const LabeledDataset& dataset, std::optional<int> jpeg_quality) {
  dataset.validate();
  if (dataset.empty()) throw InvalidArgument("model_accuracy: dataset is empty");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Image input = jpeg_quality ? jpeg_round_trip(dataset.images[i], *jpeg_quality) : dataset.images[i];
    if (argmax(forward(params, input)) == dataset.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

namespace {

std::vector<double> normalized_weight_vector(const ModelParams& p) {
  std::vector<double> out;
  for (auto layer : p.weights.weight_tensors()) {
    double norm = 0.0;
    for (double v : layer) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) throw InvalidArgument("weight_cosine_similarity: zero-norm layer");
    for (double v : layer) out.push_back(v / norm);
  }
  return out;
}

}  // namespace

double weight_cosine_similarity(const ModelParams& a, const ModelParams& b) {
  a.validate();
  b.validate();
  if (a.spec != b.spec) throw InvalidArgument("weight_cosine_similarity: spec mismatch");
  const std::vector<double> va = normalized_weight_vector(a);
  const std::vector<double> vb = normalized_weight_vector(b);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    dot += va[i] * vb[i];
    na += va[i] * va[i];
    nb += vb[i] * vb[i];
  }
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

double mean_pairwise_cosine(std::span<const ModelParams> models) {
  if (models.size() < 2) throw InvalidArgument("mean_pairwise_cosine: need at least two models");
  double sum = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (std::size_t j = i + 1; j < models.size(); ++j) {
      sum += weight_cosine_similarity(models[i], models[j]);
      ++pairs;
    }
  }
  return sum / pairs;
}

}  // namespace shield
