#include "shield/rng.hpp"

#include "shield/error.hpp"

namespace shield {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Seed derive_seed(Seed parent, std::initializer_list<std::uint64_t> keys) noexcept {
  Seed h = mix64(parent);
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

const char* to_string(IoErrorKind kind) {
  switch (kind) {
    case IoErrorKind::kOpenFailed: return "open failed";
    case IoErrorKind::kWriteFailed: return "write failed";
    case IoErrorKind::kBadMagic: return "bad magic";
    case IoErrorKind::kUnsupportedVersion: return "unsupported version";
    case IoErrorKind::kTruncated: return "truncated";
    case IoErrorKind::kBadLabel: return "bad label";
    case IoErrorKind::kBadHeader: return "bad header";
  }
  return "io error";
}

}  // namespace shield
