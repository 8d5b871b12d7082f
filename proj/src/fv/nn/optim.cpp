#include "fv/nn/optim.hpp"

#include <cmath>

#include "fv/errors.hpp"

namespace fv::nn {
namespace {

void check_shapes(const ModelParams& params, const ModelParams& grads) {
  if (!params.same_shapes(grads)) throw DimensionError("gradient shapes do not mirror parameters");
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams z;
  z.layers.resize(params.layers.size());
  for (size_t i = 0; i < params.layers.size(); ++i) {
    for (const Tensor& t : params.layers[i].tensors) z.layers[i].tensors.emplace_back(t.shape);
  }
  return z;
}

}  // namespace

void sgd_step(ModelParams& params, const ModelParams& grads, OptimizerState& state) {
  check_shapes(params, grads);
  state.step += 1;
  for (size_t i = 0; i < params.layers.size(); ++i) {
    for (size_t j = 0; j < params.layers[i].tensors.size(); ++j) {
      double* w = params.layers[i].tensors[j].ptr();
      const double* g = grads.layers[i].tensors[j].ptr();
      const size_t n = params.layers[i].tensors[j].size();
      for (size_t k = 0; k < n; ++k) w[k] -= state.lr * g[k];
    }
  }
}

void adam_step(ModelParams& params, const ModelParams& grads, OptimizerState& state) {
  check_shapes(params, grads);
  if (state.m.layers.empty()) {
    state.m = zeros_like(params);
    state.v = zeros_like(params);
  }
  state.step += 1;
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (size_t i = 0; i < params.layers.size(); ++i) {
    for (size_t j = 0; j < params.layers[i].tensors.size(); ++j) {
      double* w = params.layers[i].tensors[j].ptr();
      double* m = state.m.layers[i].tensors[j].ptr();
      double* v = state.v.layers[i].tensors[j].ptr();
      const double* g = grads.layers[i].tensors[j].ptr();
      const size_t n = params.layers[i].tensors[j].size();
      for (size_t k = 0; k < n; ++k) {
        m[k] = b1 * m[k] + (1.0 - b1) * g[k];
        v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
        const double mhat = m[k] / c1;
        const double vhat = v[k] / c2;
        w[k] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
      }
    }
  }
}

void optimizer_step(ModelParams& params, const ModelParams& grads, OptimizerState& state) {
  if (state.kind == OptimizerKind::SGD) {
    sgd_step(params, grads, state);
  } else {
    adam_step(params, grads, state);
  }
}

}  // namespace fv::nn
