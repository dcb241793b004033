#pragma once

#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "shield/dataset.hpp"
#include "shield/image.hpp"
#include "shield/nn.hpp"

namespace shield {

enum class AttackMethod { kPgd, kFgm };

const char* to_string(AttackMethod method);

struct AttackConfig {
  double eps = 16.0 / 255.0;
  // Unset => 2 * eps / iterations.
  std::optional<double> alpha;
  int iterations = 20;
  bool random_start = true;
  Seed seed = 0;
  // On: gradients flow through the differentiable JPEG at every surrogate
  // quality. Off: the surrogate's qualities are ignored and raw pixels are
  // attacked.
  bool adaptive = true;
  AttackMethod method = AttackMethod::kPgd;

  double step_size() const;
  // eps >= 0, iterations >= 1, explicit alpha > 0.
  void validate() const;
  nlohmann::ordered_json to_json() const;
};

// Attacker's differentiable stand-in for the defended pipeline: logits are
// averaged over every (model, quality) pair before the softmax.
struct Surrogate {
  std::vector<ModelParams> models;
  std::vector<int> qualities;  // empty => no compression in the path

  // Throws InvalidArgument on an empty model list or mixed specs.
  void validate() const;
};

Logits surrogate_logits(const Surrogate& s, const Plane& img);

// Gradient w.r.t. img of cross_entropy_loss(surrogate_logits(img), target).
Plane surrogate_grad(const Surrogate& s, const Plane& img, int target);

// argmin of the clean-image surrogate logits; lowest index on ties.
int least_likely_target(const Surrogate& s, const Image& img);

// Targeted PGD: optional uniform random start in the eps-ball, then
// `iterations` signed-gradient descent steps on the target loss, each
// followed by project_linf.
Image pgd_attack(const Surrogate& s, const Image& img, int target, const AttackConfig& cfg);

// Single signed step of size eps.
Image fgm_attack(const Surrogate& s, const Image& img, int target, const AttackConfig& cfg);

// Dispatches on cfg.method.
Image run_attack(const Surrogate& s, const Image& img, int target, const AttackConfig& cfg);

struct AdversarialRecord {
  std::size_t index = 0;
  int target_class = 0;
  double linf = 0.0;
  double l2 = 0.0;
  int iterations = 0;
};

struct AdversarialBatch {
  LabeledDataset images;  // ground-truth labels carried over
  std::vector<int> targets;
  std::vector<AdversarialRecord> records;
};

// Attacks every image toward its least-likely surrogate class. The random
// start for image i is seeded by derive_seed(cfg.seed, {i}).
AdversarialBatch attack_dataset(const Surrogate& s, const LabeledDataset& clean,
                                const AttackConfig& cfg);

nlohmann::ordered_json adversarial_sidecar(const AdversarialBatch& batch, const AttackConfig& cfg);

}  // namespace shield
