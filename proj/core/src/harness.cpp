#include "shield/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <string>

#include "shield/error.hpp"
#include "shield/jpeg.hpp"
#include "shield/parallel.hpp"

namespace shield {

std::string ThreatModel::name() const {
  switch (kind) {
    case Kind::kWhite: return "white";
    case Kind::kGray1: return "gray1:" + std::to_string(exposed_models);
    case Kind::kGray2: return "gray2";
    case Kind::kShield: return "shield";
  }
  return "white";
}

ThreatModel ThreatModel::parse(std::string_view text) {
  if (text == "white") return {Kind::kWhite, 0};
  if (text == "gray2") return {Kind::kGray2, 0};
  if (text == "shield") return {Kind::kShield, 0};
  constexpr std::string_view kGray1 = "gray1:";
  if (text.starts_with(kGray1)) {
    const std::string_view digits = text.substr(kGray1.size());
    int n = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty() && n >= 1) {
      return {Kind::kGray1, n};
    }
  }
  throw ConfigError("malformed scenario '" + std::string(text) + "' (expected white, gray1:N, gray2, or shield)");
}

namespace {

// Published ImageNet / ResNet-50 v2 numbers, echoed for comparison only.
nlohmann::ordered_json reference_values(ThreatModel::Kind kind) {
  nlohmann::ordered_json j;
  j["scale"] = "ImageNet validation subset, ResNet-50 v2 ensemble";
  switch (kind) {
    case ThreatModel::Kind::kWhite:
      j["derivative"] = {{"attack_success_rate", 0.643}, {"accuracy", 0.017}};
      j["originative"] = {{"attack_success_rate", 0.489}, {"accuracy", 0.022}};
      break;
    case ThreatModel::Kind::kGray1:
      j["derivative_accuracy_one_model_known"] = 0.2033;
      j["derivative_accuracy_all_models_known"] = 0.017;
      break;
    case ThreatModel::Kind::kGray2:
      j["attack_success_rate"] = 0.0;
      j["derivative_clean_accuracy"] = 0.633;
      j["derivative_accuracy_by_proxies_known"] = {0.303, 0.265, 0.231, 0.214};
      break;
    case ThreatModel::Kind::kShield:
      j["attack_success_rate"] = 0.0;
      j["derivative_accuracy"] = {{"clean", 0.633}, {"attacked", 0.381}};
      j["originative_accuracy"] = {{"clean", 0.77}, {"attacked", 0.423}};
      break;
  }
  return j;
}

double fraction(std::size_t hits, std::size_t total) {
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

TrialResult evaluate_batch(const ShieldEnsemble& defender, const AdversarialBatch& batch, Seed eval_seed) {
  const std::vector<int> predicted = shield_predict_all(defender, batch.images.images, eval_seed);
  std::size_t hits = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == batch.targets[i]) ++hits;
    if (predicted[i] == batch.images.labels[i]) ++correct;
  }
  TrialResult t;
  t.attack_success_rate = fraction(hits, predicted.size());
  t.accuracy = fraction(correct, predicted.size());
  for (const AdversarialRecord& r : batch.records) {
    t.linf_mean += r.linf;
    t.l2_mean += r.l2;
    t.linf_max = std::max(t.linf_max, r.linf);
    t.l2_max = std::max(t.l2_max, r.l2);
  }
  if (!batch.records.empty()) {
    t.linf_mean /= static_cast<double>(batch.records.size());
    t.l2_mean /= static_cast<double>(batch.records.size());
  }
  return t;
}

std::string join_indices(const std::vector<int>& idx) {
  std::string s;
  for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? "," : "") + std::to_string(idx[i]);
  return s;
}

ScenarioReport start_report(ThreatModel tm, const ShieldEnsemble& defender, const LabeledDataset& dataset,
                            const ScenarioConfig& cfg) {
  defender.validate();
  dataset.validate();
  if (dataset.empty()) throw InvalidArgument("scenario: dataset is empty");
  cfg.attack.validate();
  ScenarioReport r;
  r.threat_model = tm;
  r.config = cfg;
  r.qualities = defender.slq.qualities;
  r.slq_seed = defender.slq.seed;
  r.image_count = dataset.size();
  r.clean_accuracy = shield_accuracy(defender, dataset, cfg.eval_seed);
  return r;
}

// Headline metrics are means over trials; perturbation maxima are global.
void aggregate(ScenarioReport& r) {
  if (r.trials.empty()) throw InvariantViolation("scenario produced no trials");
  const double n = static_cast<double>(r.trials.size());
  for (const TrialResult& t : r.trials) {
    r.attack_success_rate += t.attack_success_rate / n;
    r.accuracy += t.accuracy / n;
    r.linf_mean += t.linf_mean / n;
    r.l2_mean += t.l2_mean / n;
    r.linf_max = std::max(r.linf_max, t.linf_max);
    r.l2_max = std::max(r.l2_max, t.l2_max);
  }
}

TrialResult attack_and_evaluate(const ShieldEnsemble& defender, const Surrogate& surrogate,
                                const LabeledDataset& dataset, const AttackConfig& attack, const ScenarioConfig& cfg,
                                AdversarialBatch* keep = nullptr) {
  AdversarialBatch batch = attack_dataset(surrogate, dataset, attack);
  if (cfg.observe) cfg.observe(batch, dataset);
  TrialResult t = evaluate_batch(defender, batch, cfg.eval_seed);
  if (keep != nullptr) *keep = std::move(batch);
  return t;
}

std::string member_name(const ModelParams& m, std::size_t index) {
  return m.train_quality ? "M_" + std::to_string(*m.train_quality) : "member_" + std::to_string(index);
}

}  // namespace

double attack_success_rate(const ShieldEnsemble& defender, std::span<const Image> adv_images,
                           std::span<const int> targets, Seed seed) {
  if (adv_images.size() != targets.size()) throw InvalidArgument("attack_success_rate: length mismatch");
  if (adv_images.empty()) return 0.0;
  const std::vector<int> predicted = shield_predict_all(defender, adv_images, seed);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == targets[i]) ++hits;
  }
  return fraction(hits, predicted.size());
}

ScenarioReport run_white(const ShieldEnsemble& defender, const LabeledDataset& dataset, const ScenarioConfig& cfg) {
  ScenarioReport r = start_report({ThreatModel::Kind::kWhite, 0}, defender, dataset, cfg);
  AttackConfig attack = cfg.attack;
  attack.adaptive = true;
  r.config.attack = attack;
  const Surrogate surrogate{defender.models, defender.slq.qualities};
  TrialResult t = attack_and_evaluate(defender, surrogate, dataset, attack, cfg);
  t.id = "all";
  t.models.resize(defender.models.size());
  std::iota(t.models.begin(), t.models.end(), 0);
  r.trials.push_back(std::move(t));
  aggregate(r);
  return r;
}

ScenarioReport run_gray1(const ShieldEnsemble& defender, int n, const LabeledDataset& dataset,
                         const ScenarioConfig& cfg) {
  const int k = static_cast<int>(defender.models.size());
  if (n < 1 || n > k) {
    throw InvalidArgument("gray1: exposed model count must be in [1, " + std::to_string(k) + "]");
  }
  ScenarioReport r = start_report({ThreatModel::Kind::kGray1, n}, defender, dataset, cfg);
  AttackConfig attack = cfg.attack;
  attack.adaptive = true;
  r.config.attack = attack;

  // Lexicographic n-subsets via a selection mask.
  std::vector<bool> mask(k, false);
  std::fill(mask.begin(), mask.begin() + n, true);
  do {
    std::vector<int> subset;
    Surrogate surrogate;
    surrogate.qualities = defender.slq.qualities;
    for (int i = 0; i < k; ++i) {
      if (mask[i]) {
        subset.push_back(i);
        surrogate.models.push_back(defender.models[i]);
      }
    }
    TrialResult t = attack_and_evaluate(defender, surrogate, dataset, attack, cfg);
    t.id = "models:" + join_indices(subset);
    t.models = std::move(subset);
    r.trials.push_back(std::move(t));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  aggregate(r);
  return r;
}

ScenarioReport run_gray2(const ShieldEnsemble& defender, std::span<const ModelParams> proxies,
                         const LabeledDataset& dataset, const ScenarioConfig& cfg) {
  if (proxies.empty()) throw InvalidArgument("gray2: no proxy models");
  ScenarioReport r = start_report({ThreatModel::Kind::kGray2, 0}, defender, dataset, cfg);
  AttackConfig attack = cfg.attack;
  attack.adaptive = true;
  r.config.attack = attack;

  for (std::size_t known = 1; known <= proxies.size(); ++known) {
    Surrogate surrogate{std::vector<ModelParams>(proxies.begin(), proxies.begin() + known), defender.slq.qualities};
    AdversarialBatch batch;
    TrialResult t = attack_and_evaluate(defender, surrogate, dataset, attack, cfg, &batch);
    t.id = "proxies_known:" + std::to_string(known);
    t.models.resize(known);
    std::iota(t.models.begin(), t.models.end(), 0);

    // Transfer onto each defender member alone, fed its own training quality.
    for (std::size_t m = 0; m < defender.models.size(); ++m) {
      const ModelParams& member = defender.models[m];
      std::vector<int> predicted(batch.images.size());
      parallel_for(batch.images.size(), [&](std::size_t i) {
        const Image& adv = batch.images.images[i];
        const Image input = member.train_quality ? jpeg_round_trip(adv, *member.train_quality) : adv;
        predicted[i] = argmax(forward(member, input));
      });
      std::size_t hits = 0, correct = 0;
      for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == batch.targets[i]) ++hits;
        if (predicted[i] == batch.images.labels[i]) ++correct;
      }
      t.per_model.push_back(
          {member_name(member, m), fraction(hits, predicted.size()), fraction(correct, predicted.size())});
    }
    r.trials.push_back(std::move(t));
  }
  aggregate(r);
  return r;
}

ScenarioReport run_shield_tm(const ShieldEnsemble& defender, const ModelParams& attacker_model,
                             const LabeledDataset& dataset, const ScenarioConfig& cfg) {
  ScenarioReport r = start_report({ThreatModel::Kind::kShield, 0}, defender, dataset, cfg);
  AttackConfig attack = cfg.attack;
  attack.adaptive = false;
  r.config.attack = attack;
  const Surrogate surrogate{{attacker_model}, {}};
  TrialResult t = attack_and_evaluate(defender, surrogate, dataset, attack, cfg);
  t.id = "independent_model";
  t.models = {0};
  r.trials.push_back(std::move(t));
  aggregate(r);
  return r;
}

std::vector<CurvePoint> security_curve(const ShieldEnsemble& defender, const LabeledDataset& dataset,
                                       std::span<const double> eps_list, const ScenarioConfig& cfg) {
  if (eps_list.empty()) throw InvalidArgument("security_curve: eps list is empty");
  std::vector<double> sorted(eps_list.begin(), eps_list.end());
  for (double e : sorted) {
    if (!(e >= 0.0)) throw InvalidArgument("security_curve: eps must be nonnegative");
  }
  std::sort(sorted.begin(), sorted.end());
  std::vector<CurvePoint> curve;
  curve.reserve(sorted.size());
  for (double e : sorted) {
    ScenarioConfig row = cfg;
    row.attack.eps = e;
    row.attack.alpha.reset();
    const ScenarioReport report = run_white(defender, dataset, row);
    curve.push_back({e, report.attack_success_rate, report.accuracy});
  }
  return curve;
}

std::string curve_to_csv(std::span<const CurvePoint> curve) {
  std::string out = "eps,attack_success_rate,accuracy\n";
  char line[128];
  for (const CurvePoint& p : curve) {
    std::snprintf(line, sizeof(line), "%.6f,%.6f,%.6f\n", p.eps, p.attack_success_rate, p.accuracy);
    out += line;
  }
  return out;
}

nlohmann::ordered_json ScenarioReport::to_json() const {
  nlohmann::ordered_json j;
  j["threat_model"] = threat_model.name();
  j["attack_success_rate"] = attack_success_rate;
  j["accuracy"] = accuracy;
  j["clean_accuracy"] = clean_accuracy;
  j["trials"] = trials.size();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const TrialResult& t : trials) {
    nlohmann::ordered_json row;
    row["id"] = t.id;
    row["models"] = t.models;
    row["attack_success_rate"] = t.attack_success_rate;
    row["accuracy"] = t.accuracy;
    row["linf_mean"] = t.linf_mean;
    row["linf_max"] = t.linf_max;
    row["l2_mean"] = t.l2_mean;
    row["l2_max"] = t.l2_max;
    if (!t.per_model.empty()) {
      nlohmann::ordered_json members = nlohmann::ordered_json::array();
      for (const ModelBreakdown& b : t.per_model) {
        members.push_back({{"model", b.model}, {"attack_success_rate", b.attack_success_rate}, {"accuracy", b.accuracy}});
      }
      row["per_model"] = std::move(members);
    }
    rows.push_back(std::move(row));
  }
  j["per_trial"] = std::move(rows);
  j["perturbation"] = {{"linf_mean", linf_mean}, {"linf_max", linf_max}, {"l2_mean", l2_mean}, {"l2_max", l2_max}};
  nlohmann::ordered_json c;
  c["attack"] = config.attack.to_json();
  c["qualities"] = qualities;
  c["eval_seed"] = config.eval_seed;
  c["slq_seed"] = slq_seed;
  c["image_count"] = image_count;
  j["config"] = std::move(c);
  j["reference_values"] = reference_values(threat_model.kind);
  return j;
}

}  // namespace shield
