#include "oracles.hpp"

#include "shield/jpeg.hpp"

namespace shield::oracle {

bool rounding_pattern_differs(const Plane& x, const Plane& y, int q) {
  const QuantTable table = quality_to_table(q);
  const BlockGrid gx = to_blocks(x);
  const BlockGrid gy = to_blocks(y);
  for (std::size_t b = 0; b < gx.blocks.size(); ++b) {
    Block sx = gx.blocks[b];
    Block sy = gy.blocks[b];
    for (double& v : sx) v = to_sample(v);
    for (double& v : sy) v = to_sample(v);
    const Block cx = naive_dct(sx);
    const Block cy = naive_dct(sy);
    for (int i = 0; i < 64; ++i) {
      if (std::round(cx[i] / table.entries[i]) != std::round(cy[i] / table.entries[i])) return true;
    }
  }
  return false;
}

}  // namespace shield::oracle
