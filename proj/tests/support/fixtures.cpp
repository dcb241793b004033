#include "fixtures.hpp"

#include "shield/slq.hpp"
#include "shield/train.hpp"

namespace shield::fixture {

const TinyZoo& tiny_zoo() {
  static const TinyZoo zoo = [] {
    TinyZoo z;
    z.train_set = generate_synthetic(300, 901, Split::kTrain);
    z.eval_set = generate_synthetic(50, 901, Split::kEval);

    TrainConfig base_cfg;
    base_cfg.epochs = 8;
    base_cfg.seed = 11;
    z.base = train(base_cfg, z.train_set);

    for (int q : kDefaultQualities) {
      TrainConfig c;
      c.epochs = 2;
      c.seed = 20 + static_cast<Seed>(q);
      c.jpeg_quality = q;
      c.init_from = z.base;
      z.derivatives.push_back(train(c, z.train_set));
    }

    TrainConfig ind;
    ind.epochs = 8;
    ind.seed = 12;
    z.independent = train(ind, z.train_set);

    z.ensemble = ShieldEnsemble{z.derivatives, SlqConfig{kDefaultQualities, 31}};
    return z;
  }();
  return zoo;
}

}  // namespace shield::fixture
