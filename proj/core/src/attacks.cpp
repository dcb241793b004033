#include "shield/attacks.hpp"

#include <cmath>
#include <random>
#include <string>

#include "nn_kernels.hpp"
#include "shield/diff_jpeg.hpp"
#include "shield/error.hpp"
#include "shield/parallel.hpp"

namespace shield {

const char* to_string(AttackMethod method) { return method == AttackMethod::kPgd ? "pgd" : "fgm"; }

double AttackConfig::step_size() const { return alpha.value_or(2.0 * eps / iterations); }

void AttackConfig::validate() const {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw InvalidArgument("attack: eps must be a finite value >= 0");
  if (iterations < 1) throw InvalidArgument("attack: iterations must be >= 1");
  if (alpha && !(*alpha > 0.0)) throw InvalidArgument("attack: alpha must be > 0");
}

nlohmann::ordered_json AttackConfig::to_json() const {
  nlohmann::ordered_json j;
  j["method"] = to_string(method);
  j["eps"] = eps;
  j["alpha"] = step_size();
  j["iterations"] = method == AttackMethod::kFgm ? 1 : iterations;
  j["random_start"] = method == AttackMethod::kPgd && random_start;
  j["adaptive"] = adaptive;
  j["seed"] = seed;
  return j;
}

void Surrogate::validate() const {
  if (models.empty()) throw InvalidArgument("surrogate: model list is empty");
  for (const ModelParams& m : models) {
    m.validate();
    if (m.spec != models.front().spec) throw InvalidArgument("surrogate: models do not share one spec");
  }
  for (int q : qualities) {
    if (q < 1 || q > 100) throw InvalidArgument("surrogate: quality out of range");
  }
}

namespace {

using nn_detail::Workspace;

void require_model_input(const Plane& img) {
  if (img.height != kInputSide || img.width != kInputSide) throw InvalidArgument("surrogate: input must be 32x32");
}

// Inputs seen by the models: the raw image when no qualities are set,
// otherwise one differentiable-JPEG output per quality.
std::vector<Plane> surrogate_inputs(const Surrogate& s, const Plane& img) {
  std::vector<Plane> inputs;
  if (s.qualities.empty()) {
    inputs.push_back(img);
  } else {
    inputs.reserve(s.qualities.size());
    for (int q : s.qualities) inputs.push_back(diff_jpeg_forward_raw(img, q));
  }
  return inputs;
}

Surrogate effective_surrogate(const Surrogate& s, const AttackConfig& cfg) {
  if (cfg.adaptive || s.qualities.empty()) return s;
  return Surrogate{s.models, {}};
}

}  // namespace

Logits surrogate_logits(const Surrogate& s, const Plane& img) {
  s.validate();
  require_model_input(img);
  const std::vector<Plane> inputs = surrogate_inputs(s, img);
  Logits mean{};
  Workspace ws;
  for (const ModelParams& m : s.models) {
    for (const Plane& input : inputs) {
      nn_detail::forward_pass(m.weights, input.data.data(), ws);
      for (int k = 0; k < kClassCount; ++k) mean[k] += ws.logits[k];
    }
  }
  const double n = static_cast<double>(s.models.size() * inputs.size());
  for (double& v : mean) v /= n;
  return mean;
}

Plane surrogate_grad(const Surrogate& s, const Plane& img, int target) {
  s.validate();
  require_model_input(img);
  if (target < 0 || target >= kClassCount) throw InvalidArgument("surrogate_grad: target out of range");

  const std::vector<Plane> inputs = surrogate_inputs(s, img);
  const std::size_t pairs = s.models.size() * inputs.size();
  thread_local std::vector<Workspace> workspaces;
  if (workspaces.size() < pairs) workspaces.resize(pairs);

  Logits mean{};
  for (std::size_t m = 0; m < s.models.size(); ++m) {
    for (std::size_t q = 0; q < inputs.size(); ++q) {
      Workspace& ws = workspaces[m * inputs.size() + q];
      nn_detail::forward_pass(s.models[m].weights, inputs[q].data.data(), ws);
      for (int k = 0; k < kClassCount; ++k) mean[k] += ws.logits[k];
    }
  }
  for (double& v : mean) v /= static_cast<double>(pairs);

  Logits cot = cross_entropy_loss(mean, target).grad;
  for (double& v : cot) v /= static_cast<double>(pairs);

  Plane total(img.height, img.width);
  Plane per_input(img.height, img.width);
  Plane scratch(img.height, img.width);
  for (std::size_t q = 0; q < inputs.size(); ++q) {
    std::fill(per_input.data.begin(), per_input.data.end(), 0.0);
    for (std::size_t m = 0; m < s.models.size(); ++m) {
      Workspace& ws = workspaces[m * inputs.size() + q];
      nn_detail::backward_pass(s.models[m].weights, inputs[q].data.data(), ws, cot, nullptr, scratch.data.data());
      for (std::size_t i = 0; i < per_input.data.size(); ++i) per_input.data[i] += scratch.data[i];
    }
    const Plane through = s.qualities.empty() ? per_input : diff_jpeg_vjp(img, s.qualities[q], per_input);
    for (std::size_t i = 0; i < total.data.size(); ++i) total.data[i] += through.data[i];
  }
  return total;
}

int least_likely_target(const Surrogate& s, const Image& img) { return argmin(surrogate_logits(s, img)); }

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

Image signed_step(const Surrogate& s, const Image& x, const Image& origin, int target, double step, double eps) {
  const Plane grad = surrogate_grad(s, x, target);
  Plane next = x.plane();
  for (std::size_t i = 0; i < next.data.size(); ++i) next.data[i] -= step * sign(grad.data[i]);
  return project_linf(next, origin, eps);
}

void require_target(int target) {
  if (target < 0 || target >= kClassCount) throw InvalidArgument("attack: target out of range");
}

}  // namespace

Image pgd_attack(const Surrogate& s, const Image& img, int target, const AttackConfig& cfg) {
  cfg.validate();
  require_target(target);
  const Surrogate surrogate = effective_surrogate(s, cfg);
  surrogate.validate();
  const double eps = cfg.eps;
  const double alpha = cfg.step_size();

  Image x = img;
  if (cfg.random_start && eps > 0.0) {
    Rng rng(cfg.seed);
    std::uniform_real_distribution<double> noise(-eps, eps);
    Plane start = img.plane();
    for (double& v : start.data) v += noise(rng);
    x = project_linf(start, img, eps);
  }
  for (int i = 0; i < cfg.iterations; ++i) x = signed_step(surrogate, x, img, target, alpha, eps);
  return x;
}

Image fgm_attack(const Surrogate& s, const Image& img, int target, const AttackConfig& cfg) {
  cfg.validate();
  require_target(target);
  const Surrogate surrogate = effective_surrogate(s, cfg);
  surrogate.validate();
  return signed_step(surrogate, img, img, target, cfg.eps, cfg.eps);
}

Image run_attack(const Surrogate& s, const Image& img, int target, const AttackConfig& cfg) {
  return cfg.method == AttackMethod::kPgd ? pgd_attack(s, img, target, cfg) : fgm_attack(s, img, target, cfg);
}

AdversarialBatch attack_dataset(const Surrogate& s, const LabeledDataset& clean, const AttackConfig& cfg) {
  cfg.validate();
  clean.validate();
  const Surrogate surrogate = effective_surrogate(s, cfg);
  surrogate.validate();

  const std::size_t n = clean.size();
  std::vector<Image> adv(n);
  std::vector<int> targets(n, 0);
  parallel_for(n, [&](std::size_t i) {
    const Image& img = clean.images[i];
    targets[i] = least_likely_target(surrogate, img);
    AttackConfig per_image = cfg;
    per_image.seed = derive_seed(cfg.seed, {i});
    adv[i] = run_attack(surrogate, img, targets[i], per_image);
  });

  AdversarialBatch batch;
  batch.images.images = std::move(adv);
  batch.images.labels = clean.labels;
  batch.images.split = clean.split;
  batch.targets = std::move(targets);
  batch.records.reserve(n);
  const int iterations = cfg.method == AttackMethod::kFgm ? 1 : cfg.iterations;
  for (std::size_t i = 0; i < n; ++i) {
    const PerturbationStats st = perturbation_stats(batch.images.images[i], clean.images[i]);
    batch.records.push_back({i, batch.targets[i], st.linf, st.l2, iterations});
  }
  return batch;
}

nlohmann::ordered_json adversarial_sidecar(const AdversarialBatch& batch, const AttackConfig& cfg) {
  nlohmann::ordered_json j;
  j["attack"] = cfg.to_json();
  nlohmann::ordered_json images = nlohmann::ordered_json::array();
  for (const AdversarialRecord& r : batch.records) {
    nlohmann::ordered_json row;
    row["index"] = r.index;
    row["target_class"] = r.target_class;
    row["linf"] = r.linf;
    row["l2"] = r.l2;
    row["iterations"] = r.iterations;
    images.push_back(std::move(row));
  }
  j["images"] = std::move(images);
  return j;
}

}  // namespace shield
