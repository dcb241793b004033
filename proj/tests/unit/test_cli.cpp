#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "shield/checkpoint.hpp"
#include "shield/dataset.hpp"
#include "shield/train.hpp"

using namespace shield;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
  nlohmann::json json() const { return nlohmann::json::parse(out); }
};

Result shieldctl(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A scratch directory with a config and a few tiny checkpoints, built once.
struct Workspace {
  fs::path dir;
  std::string config;
  std::string data;
  std::vector<std::string> members;

  Workspace() {
    dir = fs::temp_directory_path() / "shield_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    config = write_config("config.json", R"({
      "dataset": {"train_count": 30, "eval_count": 6, "seed": 1},
      "train": {"epochs": 1, "seed": 2},
      "slq": {"seed": 3},
      "attack": {"seed": 4, "iterations": 2},
      "scenario": {"eval_seed": 5}
    })");
    data = (dir / "eval.advd").string();
    REQUIRE(shieldctl({"dataset", "gen", "--count", "4", "--seed", "9", "--split", "eval", "--out", data}).code == 0);
    const std::string base = (dir / "base.ckpt").string();
    REQUIRE(shieldctl({"train", "--config", config, "--lineage", "base", "--out", base}).code == 0);
    for (const char* q : {"20", "40", "60", "80"}) {
      const std::string out = (dir / (std::string("m") + q + ".ckpt")).string();
      REQUIRE(shieldctl({"train", "--config", config, "--lineage", "derivative", "--quality", q, "--base", base,
                         "--out", out})
                  .code == 0);
      members.push_back(out);
    }
  }

  std::string write_config(const std::string& name, const std::string& text) const {
    const fs::path p = dir / name;
    std::ofstream(p) << text;
    return p.string();
  }

  std::string path(const std::string& name) const { return (dir / name).string(); }

  std::string member_list(std::size_t n) const {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += (i ? "," : "") + members[i];
    return s;
  }
};

const Workspace& workspace() {
  static const Workspace ws;
  return ws;
}

}  // namespace

TEST_CASE("cli: usage errors") {
  CHECK(shieldctl({}).code == 1);
  CHECK(shieldctl({"frobnicate"}).code == 1);
  CHECK(shieldctl({"--help"}).code == 0);
  CHECK(shieldctl({"dataset", "gen", "--count", "10", "--out", "x.advd"}).code == 1);  // no seed
  CHECK(shieldctl({"dataset", "gen", "--count", "0", "--seed", "1", "--out", "x.advd"}).code == 1);
}

TEST_CASE("cli: dataset gen") {
  const auto& ws = workspace();
  const std::string a = ws.path("ten_a.advd"), b = ws.path("ten_b.advd");
  const Result r = shieldctl({"dataset", "gen", "--count", "10", "--seed", "7", "--out", a});
  REQUIRE(r.code == 0);
  CHECK(r.json()["per_class"] == nlohmann::json(std::vector<int>(10, 1)));
  CHECK(r.out.find('\n') == r.out.size() - 1);
  CHECK(read_container(a).size() == 10);
  REQUIRE(shieldctl({"dataset", "gen", "--count", "10", "--seed", "7", "--out", b}).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(shieldctl({"dataset", "gen", "--count", "10", "--seed", "7", "--out", "/nonexistent/dir/x.advd"}).code == 2);
}

TEST_CASE("cli: train") {
  const auto& ws = workspace();
  CHECK(shieldctl({"train", "--config", ws.config, "--lineage", "derivative", "--quality", "20", "--out",
                   ws.path("x.ckpt")})
            .code == 1);
  CHECK(shieldctl({"train", "--config", ws.config, "--lineage", "originative", "--out", ws.path("x.ckpt")}).code == 1);
  CHECK(shieldctl({"train", "--config", ws.path("missing.json"), "--lineage", "base", "--out", ws.path("x.ckpt")})
            .code == 2);

  const ModelParams m = load_checkpoint(ws.members[1]);
  CHECK(m.lineage == Lineage::kDerivative);
  CHECK(m.train_quality == 40);

  const std::string frozen = ws.write_config("frozen.json", R"({
    "dataset": {"train_count": 10, "eval_count": 2, "seed": 1},
    "train": {"epochs": 1, "learning_rate": 0.0, "seed": 2}
  })");
  const Result r = shieldctl({"train", "--config", frozen, "--lineage", "originative", "--quality", "20", "--seed",
                              "5", "--out", ws.path("frozen.ckpt")});
  REQUIRE(r.code == 0);
  CHECK(r.json()["lineage"] == "originative");
  CHECK(load_checkpoint(ws.path("frozen.ckpt")).weights == init_params(derive_seed(5, {0})).weights);
}

TEST_CASE("cli: configuration strictness") {
  const auto& ws = workspace();
  const std::string typo = ws.write_config("typo.json", R"({"attack": {"seed": 1, "iters": 5}})");
  CHECK(shieldctl({"train", "--config", typo, "--lineage", "base", "--out", ws.path("x.ckpt")}).code == 1);
  const std::string wrong_type = ws.write_config("type.json", R"({"attack": {"seed": 1, "eps": "big"}})");
  CHECK(shieldctl({"train", "--config", wrong_type, "--lineage", "base", "--out", ws.path("x.ckpt")}).code == 1);
  const std::string not_json = ws.write_config("broken.json", "{");
  CHECK(shieldctl({"train", "--config", not_json, "--lineage", "base", "--out", ws.path("x.ckpt")}).code == 1);
  const std::string no_seeds = ws.write_config("noseed.json", R"({"dataset": {"train_count": 10}})");
  const Result r = shieldctl({"train", "--config", no_seeds, "--lineage", "base", "--out", ws.path("x.ckpt")});
  CHECK(r.code == 1);
  CHECK(r.err.find("seed") != std::string::npos);
}

TEST_CASE("cli: attack") {
  const auto& ws = workspace();
  const std::string on = ws.path("adv_on.advd"), off = ws.path("adv_off.advd");
  const Result r = shieldctl({"attack", "--config", ws.config, "--models", ws.member_list(2), "--adaptive", "on", "--in",
                              ws.data, "--out", on});
  REQUIRE(r.code == 0);
  const auto sidecar = nlohmann::json::parse(slurp(on + ".json"));
  REQUIRE(sidecar["images"].size() == 4);
  const LabeledDataset clean = read_container(ws.data);
  const LabeledDataset adv = read_container(on);
  const double eps = 16.0 / 255.0;
  for (std::size_t i = 0; i < adv.size(); ++i) {
    CHECK(sidecar["images"][i]["linf"].get<double>() <= eps);
    CHECK(linf_distance(adv.images[i], clean.images[i]) <= eps + 1.0 / 510.0);
  }
  REQUIRE(shieldctl({"attack", "--config", ws.config, "--models", ws.member_list(2), "--adaptive", "off", "--in",
                     ws.data, "--out", off})
              .code == 0);
  CHECK(slurp(on) != slurp(off));

  const std::string zero = ws.write_config("zero.json", R"({"attack": {"seed": 4, "eps": 0.0}})");
  REQUIRE(shieldctl({"attack", "--config", zero, "--models", ws.members[0], "--adaptive", "on", "--in", ws.data,
                     "--out", ws.path("adv_zero.advd")})
              .code == 0);
  const std::string src = slurp(ws.data), out = slurp(ws.path("adv_zero.advd"));
  CHECK(src.substr(14) == out.substr(14));  // records identical after the header

  // Same file layout, different architecture in the header.
  std::string odd = slurp(ws.members[1]);
  odd[odd.find("\"conv1_filters\":8") + 16] = '4';
  std::ofstream(ws.path("odd.ckpt"), std::ios::binary) << odd;
  CHECK(shieldctl({"attack", "--config", ws.config, "--models", ws.members[0] + "," + ws.path("odd.ckpt"),
                   "--adaptive", "on", "--in", ws.data, "--out", ws.path("x.advd")})
            .code == 1);
  CHECK(shieldctl({"attack", "--config", ws.config, "--models", ws.members[0], "--adaptive", "maybe", "--in", ws.data,
                   "--out", ws.path("x.advd")})
            .code == 1);
}

TEST_CASE("cli: eval") {
  const auto& ws = workspace();
  CHECK(shieldctl({"eval", "--config", ws.config, "--scenario", "gray3", "--defender", ws.member_list(4), "--report",
                   ws.path("r.json")})
            .code == 1);
  CHECK(shieldctl({"eval", "--config", ws.config, "--scenario", "gray2", "--defender", ws.member_list(4), "--report",
                   ws.path("r.json")})
            .code == 1);

  const Result g1 = shieldctl({"eval", "--config", ws.config, "--scenario", "gray1:2", "--defender",
                               ws.member_list(4), "--data", ws.data, "--report", ws.path("gray1.json")});
  REQUIRE(g1.code == 0);
  CHECK(g1.json()["trials"] == 6);
  CHECK(nlohmann::json::parse(slurp(ws.path("gray1.json")))["per_trial"].size() == 6);

  // Defaults: eps 16/255 and 20 iterations when the config leaves them out.
  const std::string defaults = ws.write_config("defaults.json", R"({
    "dataset": {"seed": 1}, "slq": {"seed": 3}, "attack": {"seed": 4}, "scenario": {"eval_seed": 5}
  })");
  const Result w = shieldctl({"eval", "--config", defaults, "--scenario", "white", "--defender", ws.members[0],
                              "--data", ws.data, "--report", ws.path("white.json"), "--curve", "0"});
  REQUIRE(w.code == 0);
  const auto report = nlohmann::json::parse(slurp(ws.path("white.json")));
  CHECK(report["config"]["attack"]["eps"].get<double>() == doctest::Approx(16.0 / 255.0));
  CHECK(report["config"]["attack"]["iterations"] == 20);
  const std::string csv = slurp(ws.path("white.csv"));
  char row[64];
  std::snprintf(row, sizeof(row), "0.000000,%.6f,%.6f\n", 0.0, report["clean_accuracy"].get<double>());
  const std::string header = "eps,attack_success_rate,accuracy\n";
  CHECK(csv.substr(0, header.size()) == header);
  CHECK(csv.substr(header.size()).find('\n') == csv.size() - header.size() - 1);  // one row
  CHECK(csv.substr(header.size(), 9) == "0.000000,");
  CHECK(csv.substr(csv.size() - 9) == std::string(row).substr(std::string(row).size() - 9));

  const Result sh = shieldctl({"eval", "--config", ws.config, "--scenario", "shield", "--defender", ws.member_list(4),
                               "--attacker", ws.path("base.ckpt"), "--data", ws.data, "--report",
                               ws.path("shield.json")});
  REQUIRE(sh.code == 0);
  CHECK(sh.json()["scenario"] == "shield");
}
