#include <doctest.h>

#include "fixtures.hpp"
#include "shield/error.hpp"
#include "shield/harness.hpp"

using namespace shield;

namespace {

LabeledDataset head(const LabeledDataset& ds, std::size_t n) {
  LabeledDataset out;
  out.split = ds.split;
  out.images.assign(ds.images.begin(), ds.images.begin() + static_cast<std::ptrdiff_t>(n));
  out.labels.assign(ds.labels.begin(), ds.labels.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

ScenarioConfig quick_cfg(double eps = 16.0 / 255.0) {
  ScenarioConfig c;
  c.attack.eps = eps;
  c.attack.iterations = 3;
  c.attack.seed = 12;
  c.eval_seed = 34;
  return c;
}

}  // namespace

TEST_CASE("threat model names") {
  for (const char* name : {"white", "gray1:1", "gray1:4", "gray2", "shield"}) {
    CHECK(ThreatModel::parse(name).name() == name);
  }
  CHECK(ThreatModel::parse("gray1:3").exposed_models == 3);
  for (const char* bad : {"", "grey", "gray1", "gray1:", "gray1:0", "gray1:2x", "gray1:-1", "White"}) {
    CHECK_THROWS_AS(ThreatModel::parse(bad), ConfigError);
  }
}

TEST_CASE("attack_success_rate counts only exact target hits") {
  const auto& zoo = fixture::tiny_zoo();
  const LabeledDataset three = head(zoo.eval_set, 3);
  const std::vector<int> pred = shield_predict_all(zoo.ensemble, three.images, 9);

  CHECK(attack_success_rate(zoo.ensemble, three.images, pred, 9) == 1.0);
  // Image 0 hits; images 1 and 2 land on a class other than the target.
  const std::vector<int> targets = {pred[0], (pred[1] + 1) % 10, (pred[2] + 1) % 10};
  CHECK(attack_success_rate(zoo.ensemble, three.images, targets, 9) == doctest::Approx(1.0 / 3.0));

  CHECK_THROWS_AS(attack_success_rate(zoo.ensemble, three.images, std::vector<int>{1, 2}, 9), InvalidArgument);
}

TEST_CASE("zero budget leaves accuracy and rarely hits the least-likely class") {
  const auto& zoo = fixture::tiny_zoo();
  const ScenarioReport r = run_white(zoo.ensemble, zoo.eval_set, quick_cfg(0.0));
  CHECK(r.accuracy == r.clean_accuracy);
  CHECK(r.attack_success_rate <= 0.05);
  CHECK(r.linf_max == 0.0);
}

TEST_CASE("white-box report echoes its configuration") {
  const auto& zoo = fixture::tiny_zoo();
  ScenarioConfig cfg;
  cfg.attack.seed = 12;
  cfg.attack.iterations = 2;  // keep the test short; defaults checked below
  cfg.eval_seed = 34;
  const ScenarioReport r = run_white(zoo.ensemble, head(zoo.eval_set, 4), cfg);
  const auto j = r.to_json();
  CHECK(j["threat_model"] == "white");
  CHECK(j["trials"] == 1);
  CHECK(j["config"]["attack"]["eps"].get<double>() == doctest::Approx(16.0 / 255.0));
  CHECK(j["config"]["attack"]["adaptive"] == true);
  CHECK(j["config"]["attack"]["seed"] == 12);
  CHECK(j["config"]["eval_seed"] == 34);
  CHECK(j["config"]["slq_seed"] == zoo.ensemble.slq.seed);
  CHECK(j["config"]["qualities"] == nlohmann::json({20, 40, 60, 80}));
  CHECK(j["config"]["image_count"] == 4);
  CHECK(j["reference_values"]["derivative"]["attack_success_rate"] == 0.643);
  CHECK(AttackConfig{}.to_json()["iterations"] == 20);

  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"threat_model", "attack_success_rate", "accuracy", "clean_accuracy", "trials",
                                         "per_trial", "perturbation", "config", "reference_values"});
}

TEST_CASE("scenarios are reproducible") {
  const auto& zoo = fixture::tiny_zoo();
  const LabeledDataset few = head(zoo.eval_set, 5);
  CHECK(run_white(zoo.ensemble, few, quick_cfg()).to_json().dump() ==
        run_white(zoo.ensemble, few, quick_cfg()).to_json().dump());
}

TEST_CASE("gray1 enumerates every subset") {
  const auto& zoo = fixture::tiny_zoo();
  const LabeledDataset few = head(zoo.eval_set, 4);
  ScenarioConfig cfg = quick_cfg();
  int batches = 0;
  cfg.observe = [&](const AdversarialBatch& adv, const LabeledDataset& clean) {
    CHECK(adv.images.size() == clean.size());
    ++batches;
  };
  const ScenarioReport two = run_gray1(zoo.ensemble, 2, few, cfg);
  CHECK(batches == 6);
  REQUIRE(two.trials.size() == 6);
  CHECK(two.trials[0].id == "models:0,1");
  CHECK(two.trials[5].id == "models:2,3");
  double mean = 0.0;
  for (const TrialResult& t : two.trials) mean += t.attack_success_rate / 6.0;
  CHECK(two.attack_success_rate == doctest::Approx(mean));

  CHECK(run_gray1(zoo.ensemble, 1, few, quick_cfg()).trials.size() == 4);
  CHECK(run_gray1(zoo.ensemble, 3, few, quick_cfg()).trials.size() == 4);

  const ScenarioReport all = run_gray1(zoo.ensemble, 4, few, quick_cfg());
  const ScenarioReport white = run_white(zoo.ensemble, few, quick_cfg());
  CHECK(all.trials.size() == 1);
  CHECK(all.attack_success_rate == white.attack_success_rate);
  CHECK(all.accuracy == white.accuracy);

  CHECK_THROWS_AS(run_gray1(zoo.ensemble, 0, few, quick_cfg()), InvalidArgument);
  CHECK_THROWS_AS(run_gray1(zoo.ensemble, 5, few, quick_cfg()), InvalidArgument);
}

TEST_CASE("gray2 grows the proxy set one model at a time") {
  const auto& zoo = fixture::tiny_zoo();
  const LabeledDataset few = head(zoo.eval_set, 4);
  const std::vector<ModelParams> proxies = {zoo.independent, zoo.base};
  const ScenarioReport r = run_gray2(zoo.ensemble, proxies, few, quick_cfg());
  REQUIRE(r.trials.size() == 2);
  CHECK(r.trials[0].id == "proxies_known:1");
  CHECK(r.trials[1].models == std::vector<int>{0, 1});
  REQUIRE(r.trials[0].per_model.size() == 4);
  CHECK(r.trials[0].per_model[0].model == "M_20");
  CHECK(r.trials[0].per_model[3].model == "M_80");
  CHECK(r.to_json()["per_trial"][0]["per_model"].size() == 4);
  CHECK_THROWS_AS(run_gray2(zoo.ensemble, std::vector<ModelParams>{}, few, quick_cfg()), InvalidArgument);
}

TEST_CASE("shield threat model attacks without compression") {
  const auto& zoo = fixture::tiny_zoo();
  const ScenarioReport r = run_shield_tm(zoo.ensemble, zoo.independent, head(zoo.eval_set, 4), quick_cfg());
  CHECK(r.trials.size() == 1);
  CHECK(r.config.attack.adaptive == false);
  CHECK(r.to_json()["threat_model"] == "shield");
}

TEST_CASE("security curve") {
  const auto& zoo = fixture::tiny_zoo();
  const LabeledDataset few = head(zoo.eval_set, 10);
  const std::vector<double> eps = {16.0 / 255.0, 0.0};
  ScenarioConfig cfg = quick_cfg();
  cfg.attack.alpha = 0.5;  // ignored per row
  const auto curve = security_curve(zoo.ensemble, few, eps, cfg);
  REQUIRE(curve.size() == 2);
  CHECK(curve[0].eps == 0.0);
  CHECK(curve[1].eps == 16.0 / 255.0);
  CHECK(curve[0].accuracy == shield_accuracy(zoo.ensemble, few, cfg.eval_seed));
  CHECK(curve[1].accuracy <= curve[0].accuracy);
  CHECK_THROWS_AS(security_curve(zoo.ensemble, few, std::vector<double>{}, cfg), InvalidArgument);

  const std::vector<CurvePoint> pts = {{0.0, 0.0, 1.0}, {0.0627451, 0.25, 0.125}};
  CHECK(curve_to_csv(pts) == "eps,attack_success_rate,accuracy\n0.000000,0.000000,1.000000\n0.062745,0.250000,0.125000\n");
}

TEST_CASE("scenario inputs are validated") {
  const auto& zoo = fixture::tiny_zoo();
  CHECK_THROWS_AS(run_white(zoo.ensemble, LabeledDataset{}, quick_cfg()), InvalidArgument);
  ScenarioConfig bad = quick_cfg();
  bad.attack.eps = -1.0;
  CHECK_THROWS_AS(run_white(zoo.ensemble, head(zoo.eval_set, 2), bad), InvalidArgument);
}
