#pragma once

#include "fv/data/dataset.hpp"
#include "fv/nn/model.hpp"
#include "fv/nn/optim.hpp"
#include "fv/rng.hpp"

namespace fv::fl {

struct LocalTrainOptions {
  int epochs = 10;
  int batch = 64;
  double lr = 0.001;
  nn::OptimizerKind optimizer = nn::OptimizerKind::Adam;
  double prox_mu = 0.0;  // proximal pull toward the received parameters
};

struct TrainResult {
  nn::ModelParams params;
  size_t delta = 0;  // samples trained on this round
  bool skipped = false;
  double mean_loss = 0.0;
};

// Copies init and runs `epochs` passes of shuffled mini-batches. When
// prox_mu > 0 the gradient gains mu * (w - init). Empty data skips the client
// and returns init untouched.
TrainResult local_train(const data::Dataset& data, const nn::ModelParams& init,
                        const std::vector<nn::LayerSpec>& stack, const nn::FeatShape& input,
                        const LocalTrainOptions& opt, Rng& rng);

// Mean cross-entropy gradient over the whole dataset at fixed parameters
// (what a one-shot gradient-sharing client reports).
nn::ModelParams local_gradient(const data::Dataset& data, const nn::ModelParams& params,
                               const std::vector<nn::LayerSpec>& stack,
                               const nn::FeatShape& input, int batch, Rng& rng);

}  // namespace fv::fl
