#pragma once

#include <array>

#include "shield/image.hpp"

namespace shield {

// Quantization divisors for one quality level, derived from the standard
// luminance table with the libjpeg quality scaling.
struct QuantTable {
  std::array<int, 64> entries{};
  int quality = 50;
};

inline constexpr std::array<int, 64> kBaseLuminanceTable = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99,
};

// Throws InvalidArgument unless 1 <= q <= 100.
QuantTable quality_to_table(int q);

// Orthonormal 2D DCT-II over an 8x8 block (row-major, index = 8*v + u for
// vertical frequency v and horizontal frequency u).
Block dct2d(const Block& block);
Block idct2d(const Block& coeffs);

// Round half away from zero.
double round_half_away(double x) noexcept;

// Lossy JPEG core without entropy coding: level shift, DCT, quantize,
// dequantize, inverse DCT, unshift, clamp. Output has the input's size.
Image jpeg_round_trip(const Image& img, int q);

// Pixel <-> level-shifted sample domain used by the codec.
inline double to_sample(double v) noexcept { return v * 255.0 - 128.0; }
inline double from_sample(double s) noexcept { return (s + 128.0) / 255.0; }

}  // namespace shield
