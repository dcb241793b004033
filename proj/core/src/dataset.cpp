#include "shield/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "shield/error.hpp"
#include "shield/nn.hpp"

namespace shield {

const char* to_string(Split split) { return split == Split::kTrain ? "train" : "eval"; }

void LabeledDataset::validate() const {
  if (images.size() != labels.size()) throw InvalidArgument("dataset: images/labels length mismatch");
  for (int label : labels) {
    if (label < 0 || label >= kClassCount) throw InvalidArgument("dataset: label out of range");
  }
}

namespace {

constexpr int kSide = 32;
constexpr double kNoiseSigma = 0.05;

Image render_sample(int label, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  const double background = uniform(0.15, 0.45);
  // Low enough that a 16/255 budget can move the classifiers, high enough
  // that clean accuracy stays near 1.
  const double contrast = uniform(0.25, 0.45);
  const double cy = 15.5 + uniform(-4.0, 4.0);
  const double cx = 15.5 + uniform(-4.0, 4.0);

  Plane p(kSide, kSide);
  if (label < 4) {
    const double theta = label * std::numbers::pi / 4.0;
    const double period = uniform(6.0, 9.0);
    const double phase = uniform(0.0, 2.0 * std::numbers::pi);
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    for (int y = 0; y < kSide; ++y) {
      for (int x = 0; x < kSide; ++x) {
        const double t = (x * ct + y * st) * 2.0 * std::numbers::pi / period + phase;
        p.at(y, x) = background + contrast * (0.5 + 0.5 * std::sin(t));
      }
    }
  } else if (label < 6) {
    const double radius = (label == 4 ? 5.0 : 10.0) + uniform(-0.5, 0.5);
    for (int y = 0; y < kSide; ++y) {
      for (int x = 0; x < kSide; ++x) {
        const double d = std::hypot(y - cy, x - cx);
        p.at(y, x) = background + (d < radius ? contrast : 0.0);
      }
    }
  } else if (label < 8) {
    const int cell = label == 6 ? 4 : 8;
    std::uniform_int_distribution<int> offset(0, cell - 1);
    const int oy = offset(rng);
    const int ox = offset(rng);
    for (int y = 0; y < kSide; ++y) {
      for (int x = 0; x < kSide; ++x) {
        const int parity = ((y + oy) / cell + (x + ox) / cell) % 2;
        p.at(y, x) = background + contrast * parity;
      }
    }
  } else {
    constexpr double kRadius = 20.0;
    for (int y = 0; y < kSide; ++y) {
      for (int x = 0; x < kSide; ++x) {
        const double r = std::min(1.0, std::hypot(y - cy, x - cx) / kRadius);
        p.at(y, x) = background + contrast * (label == 8 ? 1.0 - r : r);
      }
    }
  }

  std::normal_distribution<double> noise(0.0, kNoiseSigma);
  for (double& v : p.data) v = std::clamp(v + noise(rng), 0.0, 1.0);
  return Image(std::move(p));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

constexpr std::uint8_t kMagic[4] = {'A', 'D', 'V', 'D'};
constexpr std::uint8_t kVersion = 0x01;
constexpr std::size_t kHeaderSize = 4 + 1 + 4 + 2 + 2 + 1;

}  // namespace

LabeledDataset generate_synthetic(int count, Seed seed, Split split) {
  if (count < 1) throw InvalidArgument("generate_synthetic: count must be >= 1");
  LabeledDataset ds;
  ds.split = split;
  ds.images.reserve(count);
  ds.labels.reserve(count);
  for (int i = 0; i < count; ++i) {
    const int label = i % kClassCount;
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(split), static_cast<std::uint64_t>(i)}));
    ds.images.push_back(render_sample(label, rng));
    ds.labels.push_back(label);
  }
  return ds;
}

std::vector<std::uint8_t> encode_container(const LabeledDataset& ds) {
  ds.validate();
  const int h = ds.empty() ? 0 : ds.images.front().height();
  const int w = ds.empty() ? 0 : ds.images.front().width();
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(kVersion);
  put_u32(out, static_cast<std::uint32_t>(ds.size()));
  put_u16(out, static_cast<std::uint16_t>(h));
  put_u16(out, static_cast<std::uint16_t>(w));
  out.push_back(1);
  out.reserve(out.size() + ds.size() * (1 + static_cast<std::size_t>(h) * w));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Image& img = ds.images[i];
    if (img.height() != h || img.width() != w) throw InvalidArgument("encode_container: mixed image sizes");
    out.push_back(static_cast<std::uint8_t>(ds.labels[i]));
    for (double v : img.pixels()) out.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
  }
  return out;
}

LabeledDataset decode_container(std::span<const std::uint8_t> bytes, Split split) {
  if (bytes.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw IoError(IoErrorKind::kBadMagic, "expected \"ADVD\"");
  }
  if (bytes.size() < 5) throw IoError(IoErrorKind::kTruncated, "missing version byte");
  if (bytes[4] != kVersion) throw IoError(IoErrorKind::kUnsupportedVersion, std::to_string(bytes[4]));
  if (bytes.size() < kHeaderSize) throw IoError(IoErrorKind::kTruncated, "header");
  const std::uint32_t count = static_cast<std::uint32_t>(bytes[5]) | (static_cast<std::uint32_t>(bytes[6]) << 8) |
                              (static_cast<std::uint32_t>(bytes[7]) << 16) |
                              (static_cast<std::uint32_t>(bytes[8]) << 24);
  const int h = bytes[9] | (bytes[10] << 8);
  const int w = bytes[11] | (bytes[12] << 8);
  const int channels = bytes[13];
  if (channels != 1) throw IoError(IoErrorKind::kBadHeader, "channels must be 1");
  if (count > 0 && (h == 0 || w == 0)) throw IoError(IoErrorKind::kBadHeader, "zero image size");

  const std::size_t pixels = static_cast<std::size_t>(h) * w;
  const std::size_t record = 1 + pixels;
  LabeledDataset ds;
  ds.split = split;
  ds.images.reserve(count);
  ds.labels.reserve(count);
  std::size_t pos = kHeaderSize;
  for (std::uint32_t i = 0; i < count; ++i) {
    if (bytes.size() - pos < record) {
      throw IoError(IoErrorKind::kTruncated,
                    "record " + std::to_string(i) + " of " + std::to_string(count) + " is incomplete");
    }
    const int label = bytes[pos];
    if (label >= kClassCount) throw IoError(IoErrorKind::kBadLabel, std::to_string(label));
    std::vector<double> values(pixels);
    for (std::size_t p = 0; p < pixels; ++p) values[p] = bytes[pos + 1 + p] / 255.0;
    ds.labels.push_back(label);
    ds.images.emplace_back(h, w, std::move(values));
    pos += record;
  }
  return ds;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoErrorKind::kOpenFailed, path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(IoErrorKind::kOpenFailed, path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(IoErrorKind::kWriteFailed, path.string());
}

void write_container(const LabeledDataset& ds, const std::filesystem::path& path) {
  write_file_bytes(path, encode_container(ds));
}

LabeledDataset read_container(const std::filesystem::path& path, Split split) {
  return decode_container(read_file_bytes(path), split);
}

}  // namespace shield
