#include "shield/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <string>

#include "shield/dataset.hpp"
#include "shield/error.hpp"

namespace shield {
namespace {

constexpr std::size_t kMagicSize = sizeof(kCheckpointMagic) - 1;

static_assert(std::endian::native == std::endian::little, "checkpoint encoding assumes a little-endian host");

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const ModelParams& params) {
  params.validate();
  nlohmann::ordered_json header;
  header["spec"] = params.spec.to_json();
  header["lineage"] = to_string(params.lineage);
  header["train_quality"] =
      params.train_quality ? nlohmann::ordered_json(*params.train_quality) : nlohmann::ordered_json(nullptr);
  header["seed"] = params.seed;
  const std::string text = header.dump();

  std::vector<std::uint8_t> out(kCheckpointMagic, kCheckpointMagic + kMagicSize);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (auto tensor : params.weights.tensors()) {
    const auto* raw = reinterpret_cast<const std::uint8_t*>(tensor.data());
    out.insert(out.end(), raw, raw + tensor.size_bytes());
  }
  return out;
}

ModelParams decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagicSize || std::memcmp(bytes.data(), kCheckpointMagic, kMagicSize) != 0) {
    throw IoError(IoErrorKind::kBadMagic, "expected \"SHLDMDL1\"");
  }
  std::size_t pos = kMagicSize;
  if (bytes.size() < pos + 4) throw IoError(IoErrorKind::kTruncated, "header length");
  const std::uint32_t len = static_cast<std::uint32_t>(bytes[pos]) | (static_cast<std::uint32_t>(bytes[pos + 1]) << 8) |
                            (static_cast<std::uint32_t>(bytes[pos + 2]) << 16) |
                            (static_cast<std::uint32_t>(bytes[pos + 3]) << 24);
  pos += 4;
  if (bytes.size() - pos < len) throw IoError(IoErrorKind::kTruncated, "header");

  ModelParams params;
  try {
    const auto header = nlohmann::json::parse(bytes.begin() + pos, bytes.begin() + pos + len);
    params.spec = ModelSpec::from_json(header.at("spec"));
    params.lineage = lineage_from_string(header.at("lineage").get<std::string>());
    const auto& q = header.at("train_quality");
    if (!q.is_null()) params.train_quality = q.get<int>();
    params.seed = header.at("seed").get<Seed>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(IoErrorKind::kBadHeader, e.what());
  } catch (const InvalidArgument& e) {
    throw IoError(IoErrorKind::kBadHeader, e.what());
  }
  // A readable file describing another architecture is a model mismatch,
  // not a corrupt file.
  if (params.spec != ModelSpec{}) throw InvalidArgument("checkpoint spec differs from the supported architecture");
  pos += len;

  params.weights = ParamTensors::zeros(params.spec);
  for (auto tensor : params.weights.tensors()) {
    if (bytes.size() - pos < tensor.size_bytes()) throw IoError(IoErrorKind::kTruncated, "parameter data");
    std::memcpy(tensor.data(), bytes.data() + pos, tensor.size_bytes());
    pos += tensor.size_bytes();
  }
  if (pos != bytes.size()) throw IoError(IoErrorKind::kBadHeader, "trailing bytes after parameters");
  return params;
}

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
  write_file_bytes(path, encode_checkpoint(params));
}

ModelParams load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file_bytes(path)); }

}  // namespace shield
