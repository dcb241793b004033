#pragma once

#include "shield/image.hpp"

namespace shield {

// Cubic soft rounding: round(x) + (x - round(x))^3, round half away from
// zero. Matches hard rounding at integers and has derivative 3(x - round(x))^2.
double soft_round(double x) noexcept;
double soft_round_derivative(double x) noexcept;

// jpeg_round_trip with soft_round in place of hard rounding and without the
// final clamp. Accepts any finite input field so it can be probed off the
// [0,1] box.
Plane diff_jpeg_forward_raw(const Plane& img, int q);

// Materialized surrogate output: diff_jpeg_forward_raw clamped to [0,1].
Image diff_jpeg_forward(const Image& img, int q);

// Vector-Jacobian product of diff_jpeg_forward_raw at img. Linear in
// cotangent; throws InvalidArgument on shape mismatch.
Plane diff_jpeg_vjp(const Plane& img, int q, const Plane& cotangent);

// Forward + reverse pair bound to a fixed quality.
class DifferentiableJpeg {
 public:
  explicit DifferentiableJpeg(int quality);

  int quality() const noexcept { return quality_; }
  Plane forward(const Plane& img) const { return diff_jpeg_forward_raw(img, quality_); }
  Plane vjp(const Plane& img, const Plane& cotangent) const {
    return diff_jpeg_vjp(img, quality_, cotangent);
  }

 private:
  int quality_;
};

}  // namespace shield
