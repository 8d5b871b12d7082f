#pragma once

#include <cstdint>

#include "fv/nn/model.hpp"

namespace fv::nn {

enum class OptimizerKind : uint8_t { SGD, Adam };

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::Adam;
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int64_t step = 0;
  ModelParams m;  // first/second moments, shapes mirror the parameters
  ModelParams v;

  static OptimizerState sgd(double lr) {
    OptimizerState s;
    s.kind = OptimizerKind::SGD;
    s.lr = lr;
    return s;
  }
  static OptimizerState adam(double lr) {
    OptimizerState s;
    s.kind = OptimizerKind::Adam;
    s.lr = lr;
    return s;
  }
};

// w <- w - lr * g
void sgd_step(ModelParams& params, const ModelParams& grads, OptimizerState& state);

// Bias-corrected moment update; moments are allocated on first use.
void adam_step(ModelParams& params, const ModelParams& grads, OptimizerState& state);

void optimizer_step(ModelParams& params, const ModelParams& grads, OptimizerState& state);

}  // namespace fv::nn
