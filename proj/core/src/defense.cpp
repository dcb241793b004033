#include "shield/defense.hpp"

#include <algorithm>

#include "shield/error.hpp"
#include "shield/parallel.hpp"

namespace shield {

void ShieldEnsemble::validate() const {
  if (models.empty()) throw InvalidArgument("ensemble: model list is empty");
  for (const ModelParams& m : models) {
    m.validate();
    if (m.spec != models.front().spec) throw InvalidArgument("ensemble: models do not share one spec");
  }
  slq.validate();
}

Seed derive_call_seed(Seed ensemble_seed, Seed eval_seed, std::size_t image_index) {
  return derive_seed(ensemble_seed, {eval_seed, static_cast<std::uint64_t>(image_index)});
}

Prediction resolve_vote(std::span<const Logits> member_logits) {
  if (member_logits.empty()) throw InvalidArgument("resolve_vote: no members");
  Prediction p;
  Logits mass{};
  for (const Logits& logits : member_logits) {
    ++p.tally[argmax(logits)];
    const Logits prob = softmax(logits);
    for (int k = 0; k < kClassCount; ++k) mass[k] += prob[k];
  }
  const int top = *std::max_element(p.tally.begin(), p.tally.end());
  int best = -1;
  for (int k = 0; k < kClassCount; ++k) {
    if (p.tally[k] != top) continue;
    if (best < 0 || mass[k] > mass[best]) best = k;
  }
  p.label = best;
  return p;
}

Prediction shield_predict(const ShieldEnsemble& e, const Image& img, Seed call_seed) {
  e.validate();
  SlqConfig cfg = e.slq;
  cfg.seed = call_seed;
  const SlqResult pre = slq_preprocess(img, cfg);
  std::vector<Logits> logits;
  logits.reserve(e.models.size());
  for (const ModelParams& m : e.models) logits.push_back(forward(m, pre.image));
  return resolve_vote(logits);
}

std::vector<int> shield_predict_all(const ShieldEnsemble& e, std::span<const Image> images, Seed seed) {
  e.validate();
  std::vector<int> labels(images.size(), 0);
  parallel_for(images.size(), [&](std::size_t i) {
    labels[i] = shield_predict(e, images[i], derive_call_seed(e.slq.seed, seed, i)).label;
  });
  return labels;
}

double shield_accuracy(const ShieldEnsemble& e, const LabeledDataset& dataset, Seed seed) {
  dataset.validate();
  if (dataset.empty()) throw InvalidArgument("shield_accuracy: dataset is empty");
  const std::vector<int> predicted = shield_predict_all(e, dataset.images, seed);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == dataset.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

}  // namespace shield
