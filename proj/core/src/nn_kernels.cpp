#include "nn_kernels.hpp"

#include <algorithm>
#include <cstring>

namespace shield::nn_detail {
namespace {

// out[o] = b[o] + sum_c conv3x3(in[c], w[o][c]) with zero "same" padding.
void conv3x3_forward(const double* in, int cin, int side, const double* w, const double* b, int cout,
                     double* out) {
  const int plane = side * side;
  for (int o = 0; o < cout; ++o) {
    double* dst_plane = out + o * plane;
    std::fill(dst_plane, dst_plane + plane, b[o]);
    for (int c = 0; c < cin; ++c) {
      const double* src_plane = in + c * plane;
      for (int ky = 0; ky < 3; ++ky) {
        const int dy = ky - 1;
        const int y0 = std::max(0, -dy);
        const int y1 = std::min(side, side - dy);
        for (int kx = 0; kx < 3; ++kx) {
          const int dx = kx - 1;
          const int x0 = std::max(0, -dx);
          const int x1 = std::min(side, side - dx);
          const double wv = w[((o * cin + c) * 3 + ky) * 3 + kx];
          for (int y = y0; y < y1; ++y) {
            const double* src = src_plane + (y + dy) * side + dx;
            double* dst = dst_plane + y * side;
            for (int x = x0; x < x1; ++x) dst[x] += wv * src[x];
          }
        }
      }
    }
  }
}

// Reverse of conv3x3_forward. g_in (if non-null) is overwritten; g_w/g_b
// (if non-null) are accumulated.
void conv3x3_backward(const double* in, int cin, int side, const double* w, int cout, const double* g_out,
                      double* g_in, double* g_w, double* g_b) {
  const int plane = side * side;
  if (g_in != nullptr) std::fill(g_in, g_in + cin * plane, 0.0);
  for (int o = 0; o < cout; ++o) {
    const double* go_plane = g_out + o * plane;
    if (g_b != nullptr) {
      double s = 0.0;
      for (int i = 0; i < plane; ++i) s += go_plane[i];
      g_b[o] += s;
    }
    for (int c = 0; c < cin; ++c) {
      const double* src_plane = in + c * plane;
      double* gi_plane = g_in != nullptr ? g_in + c * plane : nullptr;
      for (int ky = 0; ky < 3; ++ky) {
        const int dy = ky - 1;
        const int y0 = std::max(0, -dy);
        const int y1 = std::min(side, side - dy);
        for (int kx = 0; kx < 3; ++kx) {
          const int dx = kx - 1;
          const int x0 = std::max(0, -dx);
          const int x1 = std::min(side, side - dx);
          const int wi = ((o * cin + c) * 3 + ky) * 3 + kx;
          const double wv = w[wi];
          double acc = 0.0;
          for (int y = y0; y < y1; ++y) {
            const double* go = go_plane + y * side;
            if (g_w != nullptr) {
              const double* src = src_plane + (y + dy) * side + dx;
              for (int x = x0; x < x1; ++x) acc += go[x] * src[x];
            }
            if (gi_plane != nullptr) {
              double* gi = gi_plane + (y + dy) * side + dx;
              for (int x = x0; x < x1; ++x) gi[x] += wv * go[x];
            }
          }
          if (g_w != nullptr) g_w[wi] += acc;
        }
      }
    }
  }
}

void relu_inplace(double* v, int n) {
  for (int i = 0; i < n; ++i) v[i] = v[i] > 0.0 ? v[i] : 0.0;
}

// 2x2 stride-2 max pool; idx records the winning offset within the channel
// plane (first maximum in scan order).
void maxpool2(const double* in, int channels, int side, double* out, int* idx) {
  const int half = side / 2;
  for (int c = 0; c < channels; ++c) {
    const double* src = in + c * side * side;
    for (int y = 0; y < half; ++y) {
      for (int x = 0; x < half; ++x) {
        int best = (2 * y) * side + 2 * x;
        double best_v = src[best];
        const int candidates[3] = {best + 1, best + side, best + side + 1};
        for (int cand : candidates) {
          if (src[cand] > best_v) {
            best_v = src[cand];
            best = cand;
          }
        }
        const int o = (c * half + y) * half + x;
        out[o] = best_v;
        idx[o] = c * side * side + best;
      }
    }
  }
}

}  // namespace

void forward_pass(const ParamTensors& w, const double* input, Workspace& ws) {
  conv3x3_forward(input, 1, kSide0, w.conv1_w.data(), w.conv1_b.data(), kC1, ws.a1.data());
  relu_inplace(ws.a1.data(), static_cast<int>(ws.a1.size()));
  maxpool2(ws.a1.data(), kC1, kSide0, ws.p1.data(), ws.p1_idx.data());
  conv3x3_forward(ws.p1.data(), kC1, kSide1, w.conv2_w.data(), w.conv2_b.data(), kC2, ws.a2.data());
  relu_inplace(ws.a2.data(), static_cast<int>(ws.a2.size()));
  maxpool2(ws.a2.data(), kC2, kSide1, ws.p2.data(), ws.p2_idx.data());
  for (int k = 0; k < kClassCount; ++k) {
    const double* row = w.dense_w.data() + static_cast<std::size_t>(k) * kFeatures;
    double s = w.dense_b[k];
    for (int j = 0; j < kFeatures; ++j) s += row[j] * ws.p2[j];
    ws.logits[k] = s;
  }
}

void backward_pass(const ParamTensors& w, const double* input, Workspace& ws, const Logits& g_logits,
                   ParamTensors* param_grads, double* input_grad) {
  // dense
  std::fill(ws.g_p2.begin(), ws.g_p2.end(), 0.0);
  for (int k = 0; k < kClassCount; ++k) {
    const double g = g_logits[k];
    if (g == 0.0) continue;
    const double* row = w.dense_w.data() + static_cast<std::size_t>(k) * kFeatures;
    for (int j = 0; j < kFeatures; ++j) ws.g_p2[j] += g * row[j];
    if (param_grads != nullptr) {
      double* grow = param_grads->dense_w.data() + static_cast<std::size_t>(k) * kFeatures;
      for (int j = 0; j < kFeatures; ++j) grow[j] += g * ws.p2[j];
      param_grads->dense_b[k] += g;
    }
  }

  // pool 2 + relu 2
  std::fill(ws.g_a2.begin(), ws.g_a2.end(), 0.0);
  for (int j = 0; j < kFeatures; ++j) ws.g_a2[ws.p2_idx[j]] += ws.g_p2[j];
  for (std::size_t i = 0; i < ws.g_a2.size(); ++i) {
    if (!(ws.a2[i] > 0.0)) ws.g_a2[i] = 0.0;
  }

  conv3x3_backward(ws.p1.data(), kC1, kSide1, w.conv2_w.data(), kC2, ws.g_a2.data(), ws.g_p1.data(),
                   param_grads != nullptr ? param_grads->conv2_w.data() : nullptr,
                   param_grads != nullptr ? param_grads->conv2_b.data() : nullptr);

  // pool 1 + relu 1
  std::fill(ws.g_a1.begin(), ws.g_a1.end(), 0.0);
  for (std::size_t j = 0; j < ws.g_p1.size(); ++j) ws.g_a1[ws.p1_idx[j]] += ws.g_p1[j];
  for (std::size_t i = 0; i < ws.g_a1.size(); ++i) {
    if (!(ws.a1[i] > 0.0)) ws.g_a1[i] = 0.0;
  }

  conv3x3_backward(input, 1, kSide0, w.conv1_w.data(), kC1, ws.g_a1.data(), input_grad,
                   param_grads != nullptr ? param_grads->conv1_w.data() : nullptr,
                   param_grads != nullptr ? param_grads->conv1_b.data() : nullptr);
}

}  // namespace shield::nn_detail
