#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "shield/attacks.hpp"
#include "shield/dataset.hpp"
#include "shield/defense.hpp"

namespace shield {

// Threat-model taxonomy, most to least severe.
struct ThreatModel {
  enum class Kind { kWhite, kGray1, kGray2, kShield };

  Kind kind = Kind::kWhite;
  int exposed_models = 0;  // Gray1 only

  // "white", "gray1:N", "gray2", "shield"
  std::string name() const;
  // Throws ConfigError on malformed strings.
  static ThreatModel parse(std::string_view text);
};

struct ScenarioConfig {
  AttackConfig attack;
  // Seed of the defender's SLQ draws during evaluation; kept separate from
  // the attack seed.
  Seed eval_seed = 0;
  // Optional: sees every adversarial batch a scenario generates, together
  // with the clean images it came from. Not part of the report.
  std::function<void(const AdversarialBatch& adv, const LabeledDataset& clean)> observe;
};

struct ModelBreakdown {
  std::string model;  // e.g. "M_20"
  double attack_success_rate = 0.0;
  double accuracy = 0.0;
};

struct TrialResult {
  std::string id;
  std::vector<int> models;  // surrogate members (defender or proxy indices)
  double attack_success_rate = 0.0;
  double accuracy = 0.0;
  double linf_mean = 0.0;
  double linf_max = 0.0;
  double l2_mean = 0.0;
  double l2_max = 0.0;
  std::vector<ModelBreakdown> per_model;
};

struct ScenarioReport {
  ThreatModel threat_model;
  double attack_success_rate = 0.0;
  double accuracy = 0.0;
  double clean_accuracy = 0.0;
  std::vector<TrialResult> trials;
  double linf_mean = 0.0;
  double linf_max = 0.0;
  double l2_mean = 0.0;
  double l2_max = 0.0;
  std::size_t image_count = 0;
  ScenarioConfig config;
  std::vector<int> qualities;
  Seed slq_seed = 0;

  nlohmann::ordered_json to_json() const;
};

// Fraction of adv images the defender labels exactly as the target.
// Throws InvalidArgument on length mismatch.
double attack_success_rate(const ShieldEnsemble& defender, std::span<const Image> adv_images,
                           std::span<const int> targets, Seed seed);

// Full ensemble and every SLQ quality exposed; adaptive attack.
ScenarioReport run_white(const ShieldEnsemble& defender, const LabeledDataset& dataset,
                         const ScenarioConfig& cfg);

// One trial per n-subset of the defender's models (lexicographic order).
ScenarioReport run_gray1(const ShieldEnsemble& defender, int n, const LabeledDataset& dataset,
                         const ScenarioConfig& cfg);

// Proxies trained independently of the defender. Row k attacks the first k
// proxies; transfer is measured on the defender and on each member alone.
ScenarioReport run_gray2(const ShieldEnsemble& defender, std::span<const ModelParams> proxies,
                         const LabeledDataset& dataset, const ScenarioConfig& cfg);

// Non-adaptive attack on a single independently trained model.
ScenarioReport run_shield_tm(const ShieldEnsemble& defender, const ModelParams& attacker_model,
                             const LabeledDataset& dataset, const ScenarioConfig& cfg);

struct CurvePoint {
  double eps = 0.0;
  double attack_success_rate = 0.0;
  double accuracy = 0.0;
};

// run_white at each eps, rows sorted by eps. An explicit alpha in cfg is
// ignored so each row uses the 2*eps/iterations schedule.
std::vector<CurvePoint> security_curve(const ShieldEnsemble& defender, const LabeledDataset& dataset,
                                       std::span<const double> eps_list, const ScenarioConfig& cfg);

// Header "eps,attack_success_rate,accuracy", 6-decimal fixed values.
std::string curve_to_csv(std::span<const CurvePoint> curve);

}  // namespace shield
