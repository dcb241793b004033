#pragma once

// Small trained models shared by the statistical tests. Built once per test
// process on first use.

#include <vector>

#include "shield/dataset.hpp"
#include "shield/defense.hpp"
#include "shield/nn.hpp"

namespace shield::fixture {

struct TinyZoo {
  LabeledDataset train_set;
  LabeledDataset eval_set;  // 50 images
  ModelParams base;
  std::vector<ModelParams> derivatives;  // one per default SLQ quality
  ModelParams independent;               // plain, separately seeded
  ShieldEnsemble ensemble;               // derivatives + default SLQ
};

const TinyZoo& tiny_zoo();

}  // namespace shield::fixture
