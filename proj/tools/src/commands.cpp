#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "run_config.hpp"
#include "shield/checkpoint.hpp"
#include "shield/dataset.hpp"
#include "shield/defense.hpp"
#include "shield/error.hpp"
#include "shield/harness.hpp"
#include "shield/train.hpp"

namespace shield::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw ConfigError("empty entry in list '" + text + "'");
    items.push_back(item);
  }
  if (items.empty()) throw ConfigError("empty list");
  return items;
}

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split_list(text)) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || !(v >= 0.0)) {
      throw ConfigError("--curve: '" + item + "' is not a non-negative number");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<ModelParams> load_models(const std::string& list) {
  std::vector<ModelParams> models;
  for (const std::string& path : split_list(list)) models.push_back(load_checkpoint(path));
  return models;
}

void write_text(const fs::path& path, const std::string& text) {
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string dump(const ojson& j, int indent) { return j.dump(indent) + "\n"; }

struct Context {
  std::ostream& out;
  std::ostream& err;
  void log(const std::string& msg) const { err << "shieldctl: " << msg << '\n'; }
  void emit(const ojson& j) const { out << j.dump() << '\n'; }
};

// dataset gen ------------------------------------------------------------

struct DatasetArgs {
  int count = 0;
  std::optional<Seed> seed;
  std::string out;
  std::string split = "train";
};

int cmd_dataset_gen(const DatasetArgs& a, const Context& ctx) {
  if (!a.seed) throw ConfigError("dataset gen: --seed is required");
  if (a.count < 1) throw ConfigError("dataset gen: --count must be >= 1");
  const Split split = a.split == "eval" ? Split::kEval : Split::kTrain;
  const LabeledDataset ds = generate_synthetic(a.count, *a.seed, split);
  write_container(ds, a.out);
  std::array<int, kClassCount> per_class{};
  for (int label : ds.labels) ++per_class[label];
  ctx.log("wrote " + std::to_string(ds.size()) + " images to " + a.out);
  ojson j;
  j["command"] = "dataset gen";
  j["out"] = a.out;
  j["count"] = ds.size();
  j["split"] = to_string(split);
  j["seed"] = *a.seed;
  j["per_class"] = per_class;
  ctx.emit(j);
  return kExitOk;
}

// train --------------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::string lineage;
  std::optional<int> quality;
  std::string out;
  std::string base;
  std::optional<Seed> seed;
  std::string data;
  std::string eval_data;
};

int cmd_train(const TrainArgs& a, const Context& ctx) {
  const RunConfig rc = RunConfig::load(a.config);
  const Lineage lineage = lineage_from_string(a.lineage);
  TrainConfig tc = rc.train_config();

  switch (lineage) {
    case Lineage::kBase:
      if (a.quality) throw ConfigError("train: a base model is trained on uncompressed images; drop --quality");
      if (!a.base.empty()) throw ConfigError("train: --base only applies to derivative models");
      break;
    case Lineage::kDerivative:
      if (a.base.empty()) throw ConfigError("train: derivative models need --base");
      if (!a.quality) throw ConfigError("train: derivative models need --quality");
      break;
    case Lineage::kOriginative:
      if (!a.quality) throw ConfigError("train: originative models need --quality");
      if (!a.base.empty()) throw ConfigError("train: --base only applies to derivative models");
      break;
  }
  tc.jpeg_quality = a.quality;
  tc.seed = a.seed ? *a.seed
                   : derive_seed(rc.train_seed(), {static_cast<std::uint64_t>(lineage),
                                                   static_cast<std::uint64_t>(a.quality.value_or(0))});
  if (!a.base.empty()) tc.init_from = load_checkpoint(a.base);
  try {
    tc.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("train: ") + e.what());
  }

  const LabeledDataset train_set = a.data.empty()
                                       ? generate_synthetic(rc.dataset.train_count, rc.dataset_seed(), Split::kTrain)
                                       : read_container(a.data, Split::kTrain);
  const LabeledDataset eval_set = a.eval_data.empty()
                                      ? generate_synthetic(rc.dataset.eval_count, rc.dataset_seed(), Split::kEval)
                                      : read_container(a.eval_data, Split::kEval);

  ctx.log("training " + std::string(to_string(lineage)) + " model on " + std::to_string(train_set.size()) +
          " images");
  const ModelParams params = train(tc, train_set);
  save_checkpoint(params, a.out);

  ojson j;
  j["command"] = "train";
  j["out"] = a.out;
  j["lineage"] = to_string(params.lineage);
  j["quality"] = a.quality ? ojson(*a.quality) : ojson(nullptr);
  j["seed"] = tc.seed;
  j["epochs"] = tc.epochs;
  j["train_accuracy"] = model_accuracy(params, train_set, a.quality);
  j["eval_accuracy"] = model_accuracy(params, eval_set, a.quality);
  ctx.emit(j);
  return kExitOk;
}

// attack -------------------------------------------------------------------

struct AttackArgs {
  std::string config;
  std::string models;
  std::string adaptive;
  std::string in;
  std::string out;
  std::string sidecar;
};

int cmd_attack(const AttackArgs& a, const Context& ctx) {
  const RunConfig rc = RunConfig::load(a.config);
  AttackConfig cfg = rc.attack_config();
  cfg.seed = rc.attack_seed();
  cfg.adaptive = a.adaptive == "on";

  const Surrogate surrogate{load_models(a.models), rc.slq.qualities};
  const LabeledDataset clean = read_container(a.in);
  ctx.log(std::string(cfg.adaptive ? "adaptive" : "non-adaptive") + " attack on " + std::to_string(clean.size()) +
          " images");
  const AdversarialBatch batch = attack_dataset(surrogate, clean, cfg);

  write_container(batch.images, a.out);
  const std::string sidecar = a.sidecar.empty() ? a.out + ".json" : a.sidecar;
  write_text(sidecar, dump(adversarial_sidecar(batch, cfg), rc.output.indent));

  double linf_max = 0.0, l2_mean = 0.0;
  for (const AdversarialRecord& r : batch.records) {
    linf_max = std::max(linf_max, r.linf);
    l2_mean += r.l2 / static_cast<double>(batch.records.size());
  }
  ojson j;
  j["command"] = "attack";
  j["out"] = a.out;
  j["sidecar"] = sidecar;
  j["images"] = batch.records.size();
  j["adaptive"] = cfg.adaptive;
  j["linf_max"] = linf_max;
  j["l2_mean"] = l2_mean;
  ctx.emit(j);
  return kExitOk;
}

// eval ---------------------------------------------------------------------

struct EvalArgs {
  std::string config;
  std::string scenario;
  std::string defender;
  std::string report;
  std::string curve;
  std::string curve_out;
  std::string proxies;
  std::string attacker;
  std::string data;
};

int cmd_eval(const EvalArgs& a, const Context& ctx) {
  const ThreatModel tm = ThreatModel::parse(a.scenario);
  const RunConfig rc = RunConfig::load(a.config);
  const std::vector<double> eps_list = a.curve.empty() ? std::vector<double>{} : parse_eps_list(a.curve);
  if (tm.kind == ThreatModel::Kind::kGray2 && a.proxies.empty()) throw ConfigError("eval: gray2 needs --proxies");
  if (tm.kind == ThreatModel::Kind::kShield && a.attacker.empty()) throw ConfigError("eval: shield needs --attacker");

  const ShieldEnsemble defender{load_models(a.defender), SlqConfig{rc.slq.qualities, rc.slq_seed()}};
  ScenarioConfig sc;
  sc.attack = rc.attack_config();
  sc.attack.seed = rc.attack_seed();
  sc.eval_seed = rc.eval_seed();
  const LabeledDataset data = a.data.empty()
                                  ? generate_synthetic(rc.dataset.eval_count, rc.dataset_seed(), Split::kEval)
                                  : read_container(a.data, Split::kEval);

  ctx.log("scenario " + tm.name() + " on " + std::to_string(data.size()) + " images");
  ScenarioReport report;
  switch (tm.kind) {
    case ThreatModel::Kind::kWhite:
      report = run_white(defender, data, sc);
      break;
    case ThreatModel::Kind::kGray1:
      report = run_gray1(defender, tm.exposed_models, data, sc);
      break;
    case ThreatModel::Kind::kGray2: {
      const std::vector<ModelParams> proxies = load_models(a.proxies);
      report = run_gray2(defender, proxies, data, sc);
      break;
    }
    case ThreatModel::Kind::kShield:
      report = run_shield_tm(defender, load_checkpoint(a.attacker), data, sc);
      break;
  }
  write_text(a.report, dump(report.to_json(), rc.output.indent));

  ojson j;
  j["command"] = "eval";
  j["scenario"] = tm.name();
  j["report"] = a.report;
  if (!eps_list.empty()) {
    const std::vector<CurvePoint> curve = security_curve(defender, data, eps_list, sc);
    const std::string path = a.curve_out.empty() ? fs::path(a.report).replace_extension(".csv").string() : a.curve_out;
    write_text(path, curve_to_csv(curve));
    j["curve"] = path;
  }
  j["attack_success_rate"] = report.attack_success_rate;
  j["accuracy"] = report.accuracy;
  j["clean_accuracy"] = report.clean_accuracy;
  j["trials"] = report.trials.size();
  ctx.emit(j);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const Context ctx{out, err};
  CLI::App app{"Compression-defense appraisal toolkit", "shieldctl"};
  app.require_subcommand(1);

  DatasetArgs da;
  CLI::App* dataset = app.add_subcommand("dataset", "Synthetic dataset tools");
  dataset->require_subcommand(1);
  CLI::App* gen = dataset->add_subcommand("gen", "Generate a labeled dataset container");
  gen->add_option("--count", da.count, "Number of images")->required();
  gen->add_option("--seed", da.seed, "Generation seed");
  gen->add_option("--out", da.out, "Output ADVD path")->required();
  gen->add_option("--split", da.split, "train or eval")->check(CLI::IsMember({"train", "eval"}));

  TrainArgs ta;
  CLI::App* train_cmd = app.add_subcommand("train", "Train one ensemble member or base model");
  train_cmd->add_option("--config", ta.config, "Run configuration JSON")->required();
  train_cmd->add_option("--lineage", ta.lineage, "base, derivative or originative")
      ->required()
      ->check(CLI::IsMember({"base", "derivative", "originative"}));
  train_cmd->add_option("--quality", ta.quality, "JPEG quality of the training images")->check(CLI::Range(1, 100));
  train_cmd->add_option("--out", ta.out, "Output checkpoint path")->required();
  train_cmd->add_option("--base", ta.base, "Base checkpoint (derivative only)");
  train_cmd->add_option("--seed", ta.seed, "Override the derived training seed");
  train_cmd->add_option("--data", ta.data, "Training ADVD (default: generate from config)");
  train_cmd->add_option("--eval-data", ta.eval_data, "Held-out ADVD (default: generate from config)");

  AttackArgs aa;
  CLI::App* attack = app.add_subcommand("attack", "Craft targeted adversarial examples");
  attack->add_option("--config", aa.config, "Run configuration JSON")->required();
  attack->add_option("--models", aa.models, "Comma-separated surrogate checkpoints")->required();
  attack->add_option("--adaptive", aa.adaptive, "on: through differentiable JPEG; off: raw pixels")
      ->required()
      ->check(CLI::IsMember({"on", "off"}));
  attack->add_option("--in", aa.in, "Clean ADVD")->required();
  attack->add_option("--out", aa.out, "Adversarial ADVD")->required();
  attack->add_option("--sidecar", aa.sidecar, "Sidecar JSON path (default: <out>.json)");

  EvalArgs ea;
  CLI::App* eval = app.add_subcommand("eval", "Run a threat-model scenario and write its report");
  eval->add_option("--config", ea.config, "Run configuration JSON")->required();
  eval->add_option("--scenario", ea.scenario, "white, gray1:N, gray2 or shield")->required();
  eval->add_option("--defender", ea.defender, "Comma-separated defender checkpoints")->required();
  eval->add_option("--report", ea.report, "Report JSON path")->required();
  eval->add_option("--curve", ea.curve, "Comma-separated eps values for a white-box security curve");
  eval->add_option("--curve-out", ea.curve_out, "Curve CSV path (default: report path with .csv)");
  eval->add_option("--proxies", ea.proxies, "Comma-separated proxy checkpoints (gray2)");
  eval->add_option("--attacker", ea.attacker, "Independent attacker checkpoint (shield)");
  eval->add_option("--data", ea.data, "Evaluation ADVD (default: generate from config)");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("shieldctl");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& s : argv_storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_dataset_gen(da, ctx);
    if (train_cmd->parsed()) return cmd_train(ta, ctx);
    if (attack->parsed()) return cmd_attack(aa, ctx);
    if (eval->parsed()) return cmd_eval(ea, ctx);
    ctx.log("no command given");
    return kExitUsage;
  } catch (const ConfigError& e) {
    ctx.log(e.what());
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    ctx.log(e.what());
    return kExitUsage;
  } catch (const IoError& e) {
    ctx.log(e.what());
    return kExitIo;
  } catch (const InvariantViolation& e) {
    ctx.log(std::string("internal error: ") + e.what());
    return kExitInternal;
  } catch (const std::exception& e) {
    ctx.log(std::string("internal error: ") + e.what());
    return kExitInternal;
  }
}

}  // namespace shield::cli
