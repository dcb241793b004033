#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace shield {

// Unconstrained single-channel scalar field, row-major. Used for gradients,
// cotangents, and intermediate values that may leave [0,1].
struct Plane {
  int height = 0;
  int width = 0;
  std::vector<double> data;

  Plane() = default;
  Plane(int h, int w, double fill = 0.0);
  Plane(int h, int w, std::vector<double> values);

  std::size_t size() const noexcept { return data.size(); }
  double& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
  bool same_shape(const Plane& other) const noexcept {
    return height == other.height && width == other.width;
  }

  friend bool operator==(const Plane&, const Plane&) = default;
};

// A valid grayscale image: positive dimensions, every pixel in [0,1].
// Construction validates; the pixel buffer is read-only afterwards.
class Image {
 public:
  Image() = default;
  Image(int height, int width, double fill);
  // Throws InvalidArgument if any value falls outside [0,1] or sizes mismatch.
  Image(int height, int width, std::vector<double> values);
  explicit Image(Plane plane);

  // Clamps every value into [0,1].
  static Image clamped(Plane plane);

  int height() const noexcept { return plane_.height; }
  int width() const noexcept { return plane_.width; }
  std::size_t pixel_count() const noexcept { return plane_.data.size(); }
  double at(int y, int x) const { return plane_.at(y, x); }
  std::span<const double> pixels() const noexcept { return plane_.data; }
  const Plane& plane() const noexcept { return plane_; }
  operator const Plane&() const noexcept { return plane_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  Plane plane_;
};

inline constexpr int kBlockSize = 8;
using Block = std::array<double, kBlockSize * kBlockSize>;

// 8x8 tiling of an image. Edge blocks are padded by replicating the last
// row/column.
struct BlockGrid {
  int height = 0;  // source image size
  int width = 0;
  int blocks_y = 0;
  int blocks_x = 0;
  int pad_bottom = 0;
  int pad_right = 0;
  std::vector<Block> blocks;  // row-major over (by, bx)

  Block& at(int by, int bx) { return blocks[static_cast<std::size_t>(by) * blocks_x + bx]; }
  const Block& at(int by, int bx) const {
    return blocks[static_cast<std::size_t>(by) * blocks_x + bx];
  }
};

BlockGrid to_blocks(const Plane& img);
// Strips padding. The values are not clamped.
Plane from_blocks_plane(const BlockGrid& grid);
Image from_blocks(const BlockGrid& grid);

// Adjoint of the edge-replicating to_blocks: every padded copy's cotangent
// is accumulated back into the source pixel it replicated.
Plane to_blocks_adjoint(const BlockGrid& cotangent);

struct PerturbationStats {
  double linf = 0.0;
  double l2 = 0.0;
};

double linf_distance(const Plane& a, const Plane& b);
double l2_distance(const Plane& a, const Plane& b);
PerturbationStats perturbation_stats(const Plane& adv, const Plane& orig);

// Clamps x_adv into the eps-ball around x_orig and then into [0,1].
Image project_linf(const Plane& x_adv, const Image& x_orig, double eps);

}  // namespace shield
