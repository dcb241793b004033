#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace shield {

using Seed = std::uint64_t;

// SplitMix64 finalizer. Used to turn structured keys into independent
// stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Derives a child seed from a parent seed and a list of integer keys
// (image index, block row, block column, ...). Order of keys matters.
Seed derive_seed(Seed parent, std::initializer_list<std::uint64_t> keys) noexcept;

// The engine used everywhere randomness is needed.
using Rng = std::mt19937_64;

inline Rng make_rng(Seed seed) { return Rng(seed); }

}  // namespace shield
