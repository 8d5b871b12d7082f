#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fv/nn/tensor.hpp"
#include "fv/rng.hpp"

namespace fv::nn {

enum class LayerKind : uint8_t { Conv2D, Dense, ReLU, Dropout, Softmax, Flatten };

enum class Padding : uint8_t { Same, Valid };

struct LayerSpec {
  LayerKind kind = LayerKind::ReLU;
  // Conv2D
  int in_channels = 0;
  int out_channels = 0;
  int kernel_h = 0;
  int kernel_w = 0;
  Padding padding = Padding::Valid;
  // Dense
  int in_features = 0;
  int out_features = 0;
  // Dropout
  double rate = 0.0;

  static LayerSpec conv2d(int in_ch, int out_ch, int kh, int kw, Padding pad) {
    LayerSpec s;
    s.kind = LayerKind::Conv2D;
    s.in_channels = in_ch;
    s.out_channels = out_ch;
    s.kernel_h = kh;
    s.kernel_w = kw;
    s.padding = pad;
    return s;
  }
  static LayerSpec dense(int in_f, int out_f) {
    LayerSpec s;
    s.kind = LayerKind::Dense;
    s.in_features = in_f;
    s.out_features = out_f;
    return s;
  }
  static LayerSpec relu() { return LayerSpec{}; }
  static LayerSpec dropout(double rate) {
    LayerSpec s;
    s.kind = LayerKind::Dropout;
    s.rate = rate;
    return s;
  }
  static LayerSpec softmax() {
    LayerSpec s;
    s.kind = LayerKind::Softmax;
    return s;
  }
  static LayerSpec flatten() {
    LayerSpec s;
    s.kind = LayerKind::Flatten;
    return s;
  }
};

// Spatial shape as it flows through the stack: (channels, h, w) for image
// layers, (features) after a flatten/dense.
struct FeatShape {
  int channels = 0;
  int h = 0;
  int w = 0;
  int features = 0;
  bool flat = false;

  size_t count() const {
    return flat ? static_cast<size_t>(features)
                : static_cast<size_t>(channels) * static_cast<size_t>(h) * static_cast<size_t>(w);
  }
};

// Output shape of a layer for a given input shape; validates compatibility
// and reports the layer index in errors.
FeatShape infer_shape(const LayerSpec& spec, const FeatShape& in, int layer_index);

// Trainable tensors of one layer (weights then bias; empty for stateless
// layers).
struct LayerParams {
  std::vector<Tensor> tensors;
};

// --- forward/backward kernels -------------------------------------------
// All kernels are batch-first: activations are (N, feature-shape) flattened
// row-major. Backward takes the upstream gradient and produces the input
// gradient plus parameter gradients (shapes mirror the parameters).

struct ConvDims {
  int n, in_ch, in_h, in_w, out_ch, out_h, out_w, kh, kw, pad_h, pad_w;
};

ConvDims conv_dims(const LayerSpec& spec, const FeatShape& in, int batch);

void conv2d_forward(const ConvDims& d, const double* x, const double* w, const double* b,
                    double* y);
void conv2d_backward(const ConvDims& d, const double* x, const double* w, const double* dy,
                     double* dx, double* dw, double* db);

void dense_forward(int n, int in_f, int out_f, const double* x, const double* w, const double* b,
                   double* y);
void dense_backward(int n, int in_f, int out_f, const double* x, const double* w, const double* dy,
                    double* dx, double* dw, double* db);

void relu_forward(size_t count, const double* x, double* y);
void relu_backward(size_t count, const double* x, const double* dy, double* dx);

// Inverted dropout; mask entries are 0 or 1/(1-rate).
void dropout_mask(size_t count, double rate, Rng& rng, double* mask);
void dropout_forward(size_t count, const double* x, const double* mask, double* y);
void dropout_backward(size_t count, const double* dy, const double* mask, double* dx);

void softmax_forward(int n, int c, const double* x, double* y);
// dy is dL/dsoftmax; y is the forward output.
void softmax_backward(int n, int c, const double* y, const double* dy, double* dx);

}  // namespace fv::nn
