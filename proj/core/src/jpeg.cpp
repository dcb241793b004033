#include "shield/jpeg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "shield/error.hpp"

namespace shield {
namespace {

using Basis = std::array<std::array<double, kBlockSize>, kBlockSize>;

// basis[k][n] = alpha(k) cos((2n+1) k pi / 16)
const Basis& dct_basis() {
  static const Basis basis = [] {
    Basis b{};
    for (int k = 0; k < kBlockSize; ++k) {
      const double alpha = k == 0 ? std::sqrt(1.0 / kBlockSize) : std::sqrt(2.0 / kBlockSize);
      for (int n = 0; n < kBlockSize; ++n) {
        b[k][n] = alpha * std::cos((2 * n + 1) * k * std::numbers::pi / (2.0 * kBlockSize));
      }
    }
    return b;
  }();
  return basis;
}

}  // namespace

QuantTable quality_to_table(int q) {
  if (q < 1 || q > 100) throw InvalidArgument("quality must be in [1,100], got " + std::to_string(q));
  const int scale = q < 50 ? 5000 / q : 200 - 2 * q;
  QuantTable table;
  table.quality = q;
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    table.entries[i] = std::clamp((kBaseLuminanceTable[i] * scale + 50) / 100, 1, 255);
  }
  return table;
}

Block dct2d(const Block& block) {
  const Basis& c = dct_basis();
  Block tmp{};
  // Rows: tmp[y][u] = sum_x c[u][x] block[y][x]
  for (int y = 0; y < kBlockSize; ++y) {
    for (int u = 0; u < kBlockSize; ++u) {
      double s = 0.0;
      for (int x = 0; x < kBlockSize; ++x) s += c[u][x] * block[y * kBlockSize + x];
      tmp[y * kBlockSize + u] = s;
    }
  }
  Block out{};
  for (int v = 0; v < kBlockSize; ++v) {
    for (int u = 0; u < kBlockSize; ++u) {
      double s = 0.0;
      for (int y = 0; y < kBlockSize; ++y) s += c[v][y] * tmp[y * kBlockSize + u];
      out[v * kBlockSize + u] = s;
    }
  }
  return out;
}

Block idct2d(const Block& coeffs) {
  const Basis& c = dct_basis();
  Block tmp{};
  // Columns first: tmp[y][u] = sum_v c[v][y] coeffs[v][u]
  for (int y = 0; y < kBlockSize; ++y) {
    for (int u = 0; u < kBlockSize; ++u) {
      double s = 0.0;
      for (int v = 0; v < kBlockSize; ++v) s += c[v][y] * coeffs[v * kBlockSize + u];
      tmp[y * kBlockSize + u] = s;
    }
  }
  Block out{};
  for (int y = 0; y < kBlockSize; ++y) {
    for (int x = 0; x < kBlockSize; ++x) {
      double s = 0.0;
      for (int u = 0; u < kBlockSize; ++u) s += c[u][x] * tmp[y * kBlockSize + u];
      out[y * kBlockSize + x] = s;
    }
  }
  return out;
}

double round_half_away(double x) noexcept { return std::round(x); }

Image jpeg_round_trip(const Image& img, int q) {
  const QuantTable table = quality_to_table(q);
  BlockGrid grid = to_blocks(img.plane());
  for (Block& block : grid.blocks) {
    for (double& v : block) v = to_sample(v);
    Block coeffs = dct2d(block);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      const double divisor = table.entries[i];
      coeffs[i] = round_half_away(coeffs[i] / divisor) * divisor;
    }
    block = idct2d(coeffs);
    for (double& v : block) v = std::clamp(from_sample(v), 0.0, 1.0);
  }
  return from_blocks(grid);
}

}  // namespace shield
