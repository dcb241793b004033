#include "shield/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shield/error.hpp"

namespace shield {
namespace {

void require_same_shape(const Plane& a, const Plane& b, const char* op) {
  if (!a.same_shape(b)) {
    throw InvalidArgument(std::string(op) + ": dimension mismatch " + std::to_string(a.height) +
                          "x" + std::to_string(a.width) + " vs " + std::to_string(b.height) + "x" +
                          std::to_string(b.width));
  }
}

void require_positive(int h, int w) {
  if (h <= 0 || w <= 0) throw InvalidArgument("image dimensions must be positive");
}

}  // namespace

Plane::Plane(int h, int w, double fill)
    : height(h), width(w), data(static_cast<std::size_t>(std::max(h, 0)) * std::max(w, 0), fill) {}

Plane::Plane(int h, int w, std::vector<double> values) : height(h), width(w), data(std::move(values)) {
  if (data.size() != static_cast<std::size_t>(h) * w) throw InvalidArgument("plane: data length != height*width");
}

Image::Image(int height, int width, double fill) : Image(Plane(height, width, fill)) {}

Image::Image(int height, int width, std::vector<double> values)
    : Image(Plane(height, width, std::move(values))) {}

Image::Image(Plane plane) : plane_(std::move(plane)) {
  require_positive(plane_.height, plane_.width);
  for (double v : plane_.data) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("image: pixel outside [0,1]");
  }
}

Image Image::clamped(Plane plane) {
  for (double& v : plane.data) v = std::clamp(v, 0.0, 1.0);
  return Image(std::move(plane));
}

BlockGrid to_blocks(const Plane& img) {
  require_positive(img.height, img.width);
  BlockGrid grid;
  grid.height = img.height;
  grid.width = img.width;
  grid.blocks_y = (img.height + kBlockSize - 1) / kBlockSize;
  grid.blocks_x = (img.width + kBlockSize - 1) / kBlockSize;
  grid.pad_bottom = grid.blocks_y * kBlockSize - img.height;
  grid.pad_right = grid.blocks_x * kBlockSize - img.width;
  grid.blocks.resize(static_cast<std::size_t>(grid.blocks_y) * grid.blocks_x);
  for (int by = 0; by < grid.blocks_y; ++by) {
    for (int bx = 0; bx < grid.blocks_x; ++bx) {
      Block& b = grid.at(by, bx);
      for (int y = 0; y < kBlockSize; ++y) {
        const int sy = std::min(by * kBlockSize + y, img.height - 1);
        for (int x = 0; x < kBlockSize; ++x) {
          const int sx = std::min(bx * kBlockSize + x, img.width - 1);
          b[y * kBlockSize + x] = img.at(sy, sx);
        }
      }
    }
  }
  return grid;
}

Plane from_blocks_plane(const BlockGrid& grid) {
  if (grid.blocks.size() != static_cast<std::size_t>(grid.blocks_y) * grid.blocks_x ||
      grid.blocks_y * kBlockSize - grid.pad_bottom != grid.height ||
      grid.blocks_x * kBlockSize - grid.pad_right != grid.width) {
    throw InvalidArgument("from_blocks: inconsistent grid");
  }
  Plane out(grid.height, grid.width);
  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) {
      out.at(y, x) = grid.at(y / kBlockSize, x / kBlockSize)[(y % kBlockSize) * kBlockSize + x % kBlockSize];
    }
  }
  return out;
}

Image from_blocks(const BlockGrid& grid) { return Image(from_blocks_plane(grid)); }

Plane to_blocks_adjoint(const BlockGrid& cotangent) {
  Plane out(cotangent.height, cotangent.width);
  for (int by = 0; by < cotangent.blocks_y; ++by) {
    for (int bx = 0; bx < cotangent.blocks_x; ++bx) {
      const Block& b = cotangent.at(by, bx);
      for (int y = 0; y < kBlockSize; ++y) {
        const int sy = std::min(by * kBlockSize + y, cotangent.height - 1);
        for (int x = 0; x < kBlockSize; ++x) {
          const int sx = std::min(bx * kBlockSize + x, cotangent.width - 1);
          out.at(sy, sx) += b[y * kBlockSize + x];
        }
      }
    }
  }
  return out;
}

double linf_distance(const Plane& a, const Plane& b) {
  require_same_shape(a, b, "linf_distance");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

double l2_distance(const Plane& a, const Plane& b) {
  require_same_shape(a, b, "l2_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    s += d * d;
  }
  return std::sqrt(s);
}

PerturbationStats perturbation_stats(const Plane& adv, const Plane& orig) {
  return {linf_distance(adv, orig), l2_distance(adv, orig)};
}

Image project_linf(const Plane& x_adv, const Image& x_orig, double eps) {
  require_same_shape(x_adv, x_orig.plane(), "project_linf");
  if (!(eps >= 0.0)) throw InvalidArgument("project_linf: eps must be nonnegative");
  Plane out(x_adv.height, x_adv.width);
  const auto orig = x_orig.pixels();
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    double lo = std::max(orig[i] - eps, 0.0);
    double hi = std::min(orig[i] + eps, 1.0);
    // Keep |out - orig| <= eps exact under floating-point rounding.
    while (orig[i] - lo > eps) lo = std::nextafter(lo, 1.0);
    while (hi - orig[i] > eps) hi = std::nextafter(hi, 0.0);
    out.data[i] = std::clamp(x_adv.data[i], lo, hi);
  }
  return Image(std::move(out));
}

}  // namespace shield
