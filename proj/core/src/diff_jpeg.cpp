#include "shield/diff_jpeg.hpp"

#include <cmath>

#include "shield/error.hpp"
#include "shield/jpeg.hpp"

namespace shield {

double soft_round(double x) noexcept {
  const double r = round_half_away(x);
  const double t = x - r;
  return r + t * t * t;
}

double soft_round_derivative(double x) noexcept {
  const double t = x - round_half_away(x);
  return 3.0 * t * t;
}

Plane diff_jpeg_forward_raw(const Plane& img, int q) {
  const QuantTable table = quality_to_table(q);
  BlockGrid grid = to_blocks(img);
  for (Block& block : grid.blocks) {
    for (double& v : block) v = to_sample(v);
    Block coeffs = dct2d(block);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      const double divisor = table.entries[i];
      coeffs[i] = soft_round(coeffs[i] / divisor) * divisor;
    }
    block = idct2d(coeffs);
    for (double& v : block) v = from_sample(v);
  }
  return from_blocks_plane(grid);
}

Image diff_jpeg_forward(const Image& img, int q) { return Image::clamped(diff_jpeg_forward_raw(img, q)); }

Plane diff_jpeg_vjp(const Plane& img, int q, const Plane& cotangent) {
  if (!img.same_shape(cotangent)) throw InvalidArgument("diff_jpeg_vjp: dimension mismatch");
  const QuantTable table = quality_to_table(q);
  const BlockGrid input = to_blocks(img);
  // Cropping is the adjoint of zero-padding, so padded positions get zero
  // cotangent before the per-block chain runs backwards.
  BlockGrid grad;
  grad.height = input.height;
  grad.width = input.width;
  grad.blocks_y = input.blocks_y;
  grad.blocks_x = input.blocks_x;
  grad.pad_bottom = input.pad_bottom;
  grad.pad_right = input.pad_right;
  grad.blocks.assign(input.blocks.size(), Block{});
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      grad.at(y / kBlockSize, x / kBlockSize)[(y % kBlockSize) * kBlockSize + x % kBlockSize] =
          cotangent.at(y, x);
    }
  }

  for (std::size_t b = 0; b < input.blocks.size(); ++b) {
    Block samples = input.blocks[b];
    for (double& v : samples) v = to_sample(v);
    const Block coeffs = dct2d(samples);

    // out = (t + 128)/255 and s = 255 v - 128: the two 255 factors cancel.
    Block g = dct2d(grad.blocks[b]);  // adjoint of the orthonormal IDCT
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double divisor = table.entries[i];
      g[i] *= soft_round_derivative(coeffs[i] / divisor);  // divisor and 1/divisor cancel
    }
    grad.blocks[b] = idct2d(g);  // adjoint of the DCT
  }
  return to_blocks_adjoint(grad);
}

DifferentiableJpeg::DifferentiableJpeg(int quality) : quality_(quality) { quality_to_table(quality); }

}  // namespace shield
