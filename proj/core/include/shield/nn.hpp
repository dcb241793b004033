#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shield/image.hpp"
#include "shield/rng.hpp"

namespace shield {

// Fixed desk-scale classifier:
//   conv3x3(1->8, same) -> relu -> maxpool2 -> conv3x3(8->16, same) -> relu
//   -> maxpool2 -> flatten (channel, row, col) -> dense(1024->10)
struct ModelSpec {
  int input_height = 32;
  int input_width = 32;
  int input_channels = 1;
  int conv1_filters = 8;
  int conv2_filters = 16;
  int kernel = 3;
  int class_count = 10;

  nlohmann::ordered_json to_json() const;
  static ModelSpec from_json(const nlohmann::json& j);
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

inline constexpr int kClassCount = 10;
inline constexpr int kInputSide = 32;

using Logits = std::array<double, kClassCount>;

enum class Lineage { kBase, kDerivative, kOriginative };

const char* to_string(Lineage lineage);
Lineage lineage_from_string(const std::string& name);

// Weight and bias arrays in declaration order. Also used for gradients.
struct ParamTensors {
  std::vector<double> conv1_w;  // [8][1][3][3]
  std::vector<double> conv1_b;  // [8]
  std::vector<double> conv2_w;  // [16][8][3][3]
  std::vector<double> conv2_b;  // [16]
  std::vector<double> dense_w;  // [10][1024]
  std::vector<double> dense_b;  // [10]

  static ParamTensors zeros(const ModelSpec& spec = {});

  std::array<std::span<double>, 6> tensors();
  std::array<std::span<const double>, 6> tensors() const;
  // Weight tensors only (no biases), in layer order.
  std::array<std::span<const double>, 3> weight_tensors() const;

  bool matches(const ModelSpec& spec) const;
  friend bool operator==(const ParamTensors&, const ParamTensors&) = default;
};

struct ModelParams {
  ModelSpec spec;
  ParamTensors weights;
  Lineage lineage = Lineage::kBase;
  std::optional<int> train_quality;
  Seed seed = 0;

  static ModelParams zeros();
  // Throws InvalidArgument when tensor shapes disagree with spec.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

Logits forward(const ModelParams& params, const Plane& img);
std::vector<Logits> forward_batch(const ModelParams& params, std::span<const Image> images);

struct BackwardResult {
  ParamTensors param_grads;
  Plane input_grad;
};

// Exact reverse-mode gradients of forward composed with a cotangent on the
// logits.
BackwardResult backward(const ModelParams& params, const Plane& img, const Logits& logit_cotangent);

// Input gradient only; skips the parameter-gradient work.
Plane input_gradient(const ModelParams& params, const Plane& img, const Logits& logit_cotangent);

struct LossResult {
  double loss = 0.0;
  Logits grad{};
};

Logits softmax(const Logits& logits);
// -log softmax(logits)[target] and its gradient softmax - onehot.
LossResult cross_entropy_loss(const Logits& logits, int target);

// Lowest index wins ties.
int argmax(const Logits& logits);
int argmin(const Logits& logits);

}  // namespace shield
