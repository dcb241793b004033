#include "shield/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "shield/error.hpp"
#include "nn_kernels.hpp"

namespace shield {

nlohmann::ordered_json ModelSpec::to_json() const {
  nlohmann::ordered_json j;
  j["input"] = {input_height, input_width, input_channels};
  j["conv1_filters"] = conv1_filters;
  j["conv2_filters"] = conv2_filters;
  j["kernel"] = kernel;
  j["class_count"] = class_count;
  return j;
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
  ModelSpec s;
  const auto& input = j.at("input");
  if (!input.is_array() || input.size() != 3) throw InvalidArgument("model spec: input must be [h, w, c]");
  s.input_height = input[0].get<int>();
  s.input_width = input[1].get<int>();
  s.input_channels = input[2].get<int>();
  s.conv1_filters = j.at("conv1_filters").get<int>();
  s.conv2_filters = j.at("conv2_filters").get<int>();
  s.kernel = j.at("kernel").get<int>();
  s.class_count = j.at("class_count").get<int>();
  return s;
}

const char* to_string(Lineage lineage) {
  switch (lineage) {
    case Lineage::kBase: return "base";
    case Lineage::kDerivative: return "derivative";
    case Lineage::kOriginative: return "originative";
  }
  return "base";
}

Lineage lineage_from_string(const std::string& name) {
  if (name == "base") return Lineage::kBase;
  if (name == "derivative") return Lineage::kDerivative;
  if (name == "originative") return Lineage::kOriginative;
  throw InvalidArgument("unknown lineage: " + name);
}

namespace {

struct Shapes {
  std::size_t conv1_w, conv1_b, conv2_w, conv2_b, dense_w, dense_b;
};

Shapes shapes_of(const ModelSpec& s) {
  const std::size_t k2 = static_cast<std::size_t>(s.kernel) * s.kernel;
  const std::size_t pooled = static_cast<std::size_t>(s.input_height / 4) * (s.input_width / 4);
  return {static_cast<std::size_t>(s.conv1_filters) * s.input_channels * k2,
          static_cast<std::size_t>(s.conv1_filters),
          static_cast<std::size_t>(s.conv2_filters) * s.conv1_filters * k2,
          static_cast<std::size_t>(s.conv2_filters),
          static_cast<std::size_t>(s.class_count) * s.conv2_filters * pooled,
          static_cast<std::size_t>(s.class_count)};
}

}  // namespace

ParamTensors ParamTensors::zeros(const ModelSpec& spec) {
  const Shapes sh = shapes_of(spec);
  ParamTensors t;
  t.conv1_w.assign(sh.conv1_w, 0.0);
  t.conv1_b.assign(sh.conv1_b, 0.0);
  t.conv2_w.assign(sh.conv2_w, 0.0);
  t.conv2_b.assign(sh.conv2_b, 0.0);
  t.dense_w.assign(sh.dense_w, 0.0);
  t.dense_b.assign(sh.dense_b, 0.0);
  return t;
}

std::array<std::span<double>, 6> ParamTensors::tensors() {
  return {conv1_w, conv1_b, conv2_w, conv2_b, dense_w, dense_b};
}

std::array<std::span<const double>, 6> ParamTensors::tensors() const {
  return {conv1_w, conv1_b, conv2_w, conv2_b, dense_w, dense_b};
}

std::array<std::span<const double>, 3> ParamTensors::weight_tensors() const {
  return {conv1_w, conv2_w, dense_w};
}

bool ParamTensors::matches(const ModelSpec& spec) const {
  const Shapes sh = shapes_of(spec);
  return conv1_w.size() == sh.conv1_w && conv1_b.size() == sh.conv1_b && conv2_w.size() == sh.conv2_w &&
         conv2_b.size() == sh.conv2_b && dense_w.size() == sh.dense_w && dense_b.size() == sh.dense_b;
}

ModelParams ModelParams::zeros() {
  ModelParams p;
  p.weights = ParamTensors::zeros(p.spec);
  return p;
}

void ModelParams::validate() const {
  if (spec != ModelSpec{}) throw InvalidArgument("model spec differs from the supported architecture");
  if (!weights.matches(spec)) throw InvalidArgument("parameter shapes do not match the model spec");
}

namespace {

using namespace nn_detail;

void require_input(const Plane& img) {
  if (img.height != kSide0 || img.width != kSide0) {
    throw InvalidArgument("model input must be 32x32, got " + std::to_string(img.height) + "x" +
                          std::to_string(img.width));
  }
}

Workspace& thread_workspace() {
  thread_local Workspace ws;
  return ws;
}

}  // namespace

Logits forward(const ModelParams& params, const Plane& img) {
  params.validate();
  require_input(img);
  Workspace& ws = thread_workspace();
  forward_pass(params.weights, img.data.data(), ws);
  return ws.logits;
}

std::vector<Logits> forward_batch(const ModelParams& params, std::span<const Image> images) {
  std::vector<Logits> out;
  out.reserve(images.size());
  for (const Image& img : images) out.push_back(forward(params, img));
  return out;
}

BackwardResult backward(const ModelParams& params, const Plane& img, const Logits& logit_cotangent) {
  params.validate();
  require_input(img);
  Workspace& ws = thread_workspace();
  BackwardResult result{ParamTensors::zeros(params.spec), Plane(kSide0, kSide0)};
  forward_pass(params.weights, img.data.data(), ws);
  backward_pass(params.weights, img.data.data(), ws, logit_cotangent, &result.param_grads,
                result.input_grad.data.data());
  return result;
}

Plane input_gradient(const ModelParams& params, const Plane& img, const Logits& logit_cotangent) {
  params.validate();
  require_input(img);
  Workspace& ws = thread_workspace();
  Plane grad(kSide0, kSide0);
  forward_pass(params.weights, img.data.data(), ws);
  backward_pass(params.weights, img.data.data(), ws, logit_cotangent, nullptr, grad.data.data());
  return grad;
}

Logits softmax(const Logits& logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  Logits p{};
  double z = 0.0;
  for (int k = 0; k < kClassCount; ++k) {
    p[k] = std::exp(logits[k] - m);
    z += p[k];
  }
  for (double& v : p) v /= z;
  return p;
}

LossResult cross_entropy_loss(const Logits& logits, int target) {
  if (target < 0 || target >= kClassCount) {
    throw InvalidArgument("cross_entropy_loss: target out of range: " + std::to_string(target));
  }
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double v : logits) z += std::exp(v - m);
  LossResult r;
  r.loss = -(logits[target] - m - std::log(z));
  for (int k = 0; k < kClassCount; ++k) r.grad[k] = std::exp(logits[k] - m) / z;
  r.grad[target] -= 1.0;
  return r;
}

int argmax(const Logits& logits) {
  return static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

int argmin(const Logits& logits) {
  return static_cast<int>(std::min_element(logits.begin(), logits.end()) - logits.begin());
}

}  // namespace shield
