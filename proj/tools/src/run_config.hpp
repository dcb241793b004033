#pragma once

// JSON run configuration shared by the shieldctl subcommands.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shield/attacks.hpp"
#include "shield/rng.hpp"
#include "shield/train.hpp"

namespace shield::cli {

struct DatasetSection {
  int train_count = 1000;
  int eval_count = 200;
  std::optional<Seed> seed;
};

struct TrainSection {
  int epochs = 15;
  int batch_size = 16;
  double learning_rate = 0.02;
  double momentum = 0.9;
  double derivative_lr_scale = 0.2;
  std::optional<Seed> seed;
};

struct SlqSection {
  std::vector<int> qualities = {20, 40, 60, 80};
  std::optional<Seed> seed;
};

struct AttackSection {
  double eps = 16.0 / 255.0;
  std::optional<double> alpha;  // unset => 2 * eps / iterations
  int iterations = 20;
  bool random_start = true;
  AttackMethod method = AttackMethod::kPgd;
  std::optional<Seed> seed;
};

struct ScenarioSection {
  std::optional<Seed> eval_seed;
};

struct OutputSection {
  int indent = 2;  // JSON report indentation; -1 for compact
};

// Every field has a default except the seeds, which must be given whenever a
// command needs them. Unknown keys and mistyped values are ConfigErrors.
struct RunConfig {
  DatasetSection dataset;
  TrainSection train;
  SlqSection slq;
  AttackSection attack;
  ScenarioSection scenario;
  OutputSection output;

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);

  Seed dataset_seed() const;
  Seed train_seed() const;
  Seed slq_seed() const;
  Seed attack_seed() const;
  Seed eval_seed() const;

  TrainConfig train_config() const;  // seed and quality left for the caller
  AttackConfig attack_config() const;
};

}  // namespace shield::cli
