#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "fv/nn/layers.hpp"
#include "fv/nn/tensor.hpp"
#include "fv/rng.hpp"
#include "fv/signal/frame.hpp"

namespace fv::nn {

// Per-layer tensor sets; the unit of exchange between clients and server.
// Index i matches the layer-spec list; stateless layers hold no tensors.
struct ModelParams {
  std::vector<LayerParams> layers;

  bool same_shapes(const ModelParams& o) const;
  size_t tensor_count() const;

  template <typename F>
  void for_each(F&& f) {
    for (auto& l : layers)
      for (auto& t : l.tensors) f(t);
  }
  template <typename F>
  void for_each(F&& f) const {
    for (const auto& l : layers)
      for (const auto& t : l.tensors) f(t);
  }
};

// The classifier used everywhere: two conv layers (shape-preserving then
// unpadded), dropout after each, and a two-stage dense head.
std::vector<LayerSpec> classifier_stack(int classes, int frame_len = 128, int dense_width = 128,
                                        double dropout_rate = 0.5);

FeatShape input_shape(int frame_len);

// Validates chaining of the whole stack; throws DimensionError naming the
// offending layer.
std::vector<FeatShape> validate_stack(const std::vector<LayerSpec>& spec, const FeatShape& input);

// Weights uniform in +/- 1/sqrt(fan_in), biases zero, deterministic in seed.
ModelParams init_model(const std::vector<LayerSpec>& spec, const FeatShape& input, uint64_t seed);

// Raw logits (no softmax). Dropout draws masks from rng only in train mode.
Tensor forward(const ModelParams& params, const std::vector<LayerSpec>& spec,
               const FeatShape& input, const Tensor& batch, bool train_mode, Rng& rng);

// Mean negative log softmax probability of the true class plus its gradient
// w.r.t. the logits ((softmax - onehot) / N).
struct CrossEntropy {
  double loss = 0.0;
  Tensor dlogits;
};
CrossEntropy cross_entropy(const Tensor& logits, const std::vector<int>& labels);

// Full backprop; dropout masks are shared with the internal forward pass.
struct BackwardResult {
  ModelParams grads;
  double loss = 0.0;
  Tensor logits;
};
BackwardResult backward(const ModelParams& params, const std::vector<LayerSpec>& spec,
                        const FeatShape& input, const Tensor& batch, const std::vector<int>& labels,
                        Rng& rng);

// Frames -> batch tensor (N x 2 x len treated as one-channel images).
Tensor frames_to_batch(const std::vector<const signal::Frame*>& frames, int frame_len);

struct EvalResult {
  double accuracy = 0.0;
  double loss = 0.0;
  std::map<int, double> per_snr_accuracy;
  std::vector<int> predictions;
};

EvalResult evaluate(const ModelParams& params, const std::vector<LayerSpec>& spec,
                    const FeatShape& input, const std::vector<const signal::Frame*>& frames,
                    int batch_size = 256);

}  // namespace fv::nn
