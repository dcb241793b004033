#pragma once

// Internal: fixed-shape forward/backward kernels for the desk-scale CNN.

#include <array>
#include <vector>

#include "shield/nn.hpp"

namespace shield::nn_detail {

inline constexpr int kSide0 = 32;  // input
inline constexpr int kSide1 = 16;  // after pool 1
inline constexpr int kSide2 = 8;   // after pool 2
inline constexpr int kC1 = 8;
inline constexpr int kC2 = 16;
inline constexpr int kFeatures = kC2 * kSide2 * kSide2;

struct Workspace {
  std::vector<double> a1 = std::vector<double>(kC1 * kSide0 * kSide0);  // relu(conv1)
  std::vector<double> p1 = std::vector<double>(kC1 * kSide1 * kSide1);
  std::vector<int> p1_idx = std::vector<int>(kC1 * kSide1 * kSide1);
  std::vector<double> a2 = std::vector<double>(kC2 * kSide1 * kSide1);  // relu(conv2)
  std::vector<double> p2 = std::vector<double>(kFeatures);
  std::vector<int> p2_idx = std::vector<int>(kFeatures);
  Logits logits{};

  // backward scratch
  std::vector<double> g_p2 = std::vector<double>(kFeatures);
  std::vector<double> g_a2 = std::vector<double>(kC2 * kSide1 * kSide1);
  std::vector<double> g_p1 = std::vector<double>(kC1 * kSide1 * kSide1);
  std::vector<double> g_a1 = std::vector<double>(kC1 * kSide0 * kSide0);
};

void forward_pass(const ParamTensors& w, const double* input, Workspace& ws);

// Requires a preceding forward_pass on the same input. Accumulates into
// param_grads (if non-null) and overwrites input_grad (if non-null).
void backward_pass(const ParamTensors& w, const double* input, Workspace& ws, const Logits& g_logits,
                   ParamTensors* param_grads, double* input_grad);

}  // namespace shield::nn_detail
