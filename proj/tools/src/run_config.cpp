#include "run_config.hpp"

#include <initializer_list>
#include <string_view>

#include "shield/dataset.hpp"
#include "shield/error.hpp"
#include "shield/slq.hpp"

namespace shield::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::string_view section, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) {
    throw ConfigError("config: '" + std::string(section.empty() ? "document" : section) + "' must be an object");
  }
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    if (!known) {
      const std::string name = section.empty() ? key : std::string(section) + "." + key;
      throw ConfigError("config: unknown key '" + name + "'");
    }
  }
}

std::string where(std::string_view section, std::string_view key) {
  return std::string(section) + "." + std::string(key);
}

template <typename T>
void read(const json& obj, std::string_view section, std::string_view key, T& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw ConfigError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw ConfigError("");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw ConfigError("");
    }
    out = it->get<T>();
  } catch (const std::exception&) {
    throw ConfigError("config: '" + where(section, key) + "' has the wrong type");
  }
}

void read_seed(const json& obj, std::string_view section, std::string_view key, std::optional<Seed>& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  if (it->is_number_unsigned()) {
    out = it->get<Seed>();
  } else if (it->is_number_integer() && it->get<long long>() >= 0) {
    out = static_cast<Seed>(it->get<long long>());
  } else {
    throw ConfigError("config: '" + where(section, key) + "' must be a non-negative integer");
  }
}

Seed require(const std::optional<Seed>& s, const char* name) {
  if (!s) throw ConfigError(std::string("config: '") + name + "' is required for this command");
  return *s;
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  reject_unknown(j, "", {"dataset", "train", "slq", "attack", "scenario", "output"});

  if (const auto it = j.find("dataset"); it != j.end()) {
    reject_unknown(*it, "dataset", {"train_count", "eval_count", "seed"});
    read(*it, "dataset", "train_count", c.dataset.train_count);
    read(*it, "dataset", "eval_count", c.dataset.eval_count);
    read_seed(*it, "dataset", "seed", c.dataset.seed);
    if (c.dataset.train_count < 1 || c.dataset.eval_count < 1) throw ConfigError("config: dataset counts must be >= 1");
  }
  if (const auto it = j.find("train"); it != j.end()) {
    reject_unknown(*it, "train",
                   {"epochs", "batch_size", "learning_rate", "momentum", "derivative_lr_scale", "seed"});
    read(*it, "train", "epochs", c.train.epochs);
    read(*it, "train", "batch_size", c.train.batch_size);
    read(*it, "train", "learning_rate", c.train.learning_rate);
    read(*it, "train", "momentum", c.train.momentum);
    read(*it, "train", "derivative_lr_scale", c.train.derivative_lr_scale);
    read_seed(*it, "train", "seed", c.train.seed);
  }
  if (const auto it = j.find("slq"); it != j.end()) {
    reject_unknown(*it, "slq", {"qualities", "seed"});
    read(*it, "slq", "qualities", c.slq.qualities);
    read_seed(*it, "slq", "seed", c.slq.seed);
  }
  if (const auto it = j.find("attack"); it != j.end()) {
    reject_unknown(*it, "attack", {"eps", "alpha", "iterations", "random_start", "method", "seed"});
    read(*it, "attack", "eps", c.attack.eps);
    if (const auto a = it->find("alpha"); a != it->end() && !a->is_null()) {
      double alpha = 0.0;
      read(*it, "attack", "alpha", alpha);
      c.attack.alpha = alpha;
    }
    read(*it, "attack", "iterations", c.attack.iterations);
    read(*it, "attack", "random_start", c.attack.random_start);
    std::string method = "pgd";
    read(*it, "attack", "method", method);
    if (method == "pgd") {
      c.attack.method = AttackMethod::kPgd;
    } else if (method == "fgm") {
      c.attack.method = AttackMethod::kFgm;
    } else {
      throw ConfigError("config: 'attack.method' must be \"pgd\" or \"fgm\"");
    }
    read_seed(*it, "attack", "seed", c.attack.seed);
  }
  if (const auto it = j.find("scenario"); it != j.end()) {
    reject_unknown(*it, "scenario", {"eval_seed"});
    read_seed(*it, "scenario", "eval_seed", c.scenario.eval_seed);
  }
  if (const auto it = j.find("output"); it != j.end()) {
    reject_unknown(*it, "output", {"indent"});
    read(*it, "output", "indent", c.output.indent);
  }

  // Surface range problems as configuration errors rather than later
  // library exceptions.
  try {
    SlqConfig{c.slq.qualities, 0}.validate();
    c.train_config().validate();
    AttackConfig a = c.attack_config();
    a.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file_bytes(path);
  json j;
  try {
    j = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

Seed RunConfig::dataset_seed() const { return require(dataset.seed, "dataset.seed"); }
Seed RunConfig::train_seed() const { return require(train.seed, "train.seed"); }
Seed RunConfig::slq_seed() const { return require(slq.seed, "slq.seed"); }
Seed RunConfig::attack_seed() const { return require(attack.seed, "attack.seed"); }
Seed RunConfig::eval_seed() const { return require(scenario.eval_seed, "scenario.eval_seed"); }

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.epochs = train.epochs;
  t.batch_size = train.batch_size;
  t.learning_rate = train.learning_rate;
  t.momentum = train.momentum;
  t.derivative_lr_scale = train.derivative_lr_scale;
  return t;
}

AttackConfig RunConfig::attack_config() const {
  AttackConfig a;
  a.eps = attack.eps;
  a.alpha = attack.alpha;
  a.iterations = attack.iterations;
  a.random_start = attack.random_start;
  a.method = attack.method;
  a.seed = attack.seed.value_or(0);
  return a;
}

}  // namespace shield::cli
