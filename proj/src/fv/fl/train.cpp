#include "fv/fl/train.hpp"

namespace fv::fl {
namespace {

void add_prox_gradient(nn::ModelParams& grads, const nn::ModelParams& params,
                       const nn::ModelParams& anchor, double mu) {
  for (size_t l = 0; l < grads.layers.size(); ++l) {
    for (size_t t = 0; t < grads.layers[l].tensors.size(); ++t) {
      double* g = grads.layers[l].tensors[t].ptr();
      const double* w = params.layers[l].tensors[t].ptr();
      const double* a = anchor.layers[l].tensors[t].ptr();
      const size_t n = grads.layers[l].tensors[t].size();
      for (size_t k = 0; k < n; ++k) g[k] += mu * (w[k] - a[k]);
    }
  }
}

}  // namespace

TrainResult local_train(const data::Dataset& data, const nn::ModelParams& init,
                        const std::vector<nn::LayerSpec>& stack, const nn::FeatShape& input,
                        const LocalTrainOptions& opt, Rng& rng) {
  TrainResult res;
  if (data.empty()) {
    res.params = init;
    res.skipped = true;
    return res;
  }
  res.params = init;
  res.delta = data.size();
  nn::OptimizerState state = opt.optimizer == nn::OptimizerKind::SGD
                                 ? nn::OptimizerState::sgd(opt.lr)
                                 : nn::OptimizerState::adam(opt.lr);
  std::vector<size_t> order(data.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  const int frame_len = input.w;
  double loss_sum = 0.0;
  size_t loss_count = 0;
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    rng.shuffle(order);
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(opt.batch)) {
      const size_t end = std::min(order.size(), start + static_cast<size_t>(opt.batch));
      std::vector<const data::Frame*> chunk;
      std::vector<int> labels;
      chunk.reserve(end - start);
      labels.reserve(end - start);
      for (size_t i = start; i < end; ++i) {
        chunk.push_back(&data.frames[order[i]]);
        labels.push_back(data.frames[order[i]].label);
      }
      nn::Tensor batch = nn::frames_to_batch(chunk, frame_len);
      nn::BackwardResult bw = nn::backward(res.params, stack, input, batch, labels, rng);
      if (opt.prox_mu > 0.0) add_prox_gradient(bw.grads, res.params, init, opt.prox_mu);
      nn::optimizer_step(res.params, bw.grads, state);
      loss_sum += bw.loss;
      loss_count += 1;
    }
  }
  res.mean_loss = loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0;
  return res;
}

nn::ModelParams local_gradient(const data::Dataset& data, const nn::ModelParams& params,
                               const std::vector<nn::LayerSpec>& stack,
                               const nn::FeatShape& input, int batch, Rng& rng) {
  nn::ModelParams total;
  total.layers.resize(params.layers.size());
  for (size_t l = 0; l < params.layers.size(); ++l) {
    for (const nn::Tensor& t : params.layers[l].tensors) {
      total.layers[l].tensors.emplace_back(t.shape);
    }
  }
  const int frame_len = input.w;
  const size_t n_total = data.size();
  for (size_t start = 0; start < n_total; start += static_cast<size_t>(batch)) {
    const size_t end = std::min(n_total, start + static_cast<size_t>(batch));
    std::vector<const data::Frame*> chunk;
    std::vector<int> labels;
    for (size_t i = start; i < end; ++i) {
      chunk.push_back(&data.frames[i]);
      labels.push_back(data.frames[i].label);
    }
    nn::Tensor b = nn::frames_to_batch(chunk, frame_len);
    nn::BackwardResult bw = nn::backward(params, stack, input, b, labels, rng);
    const double share = static_cast<double>(end - start) / static_cast<double>(n_total);
    for (size_t l = 0; l < total.layers.size(); ++l) {
      for (size_t t = 0; t < total.layers[l].tensors.size(); ++t) {
        double* dst = total.layers[l].tensors[t].ptr();
        const double* src = bw.grads.layers[l].tensors[t].ptr();
        const size_t n = total.layers[l].tensors[t].size();
        for (size_t k = 0; k < n; ++k) dst[k] += share * src[k];
      }
    }
  }
  return total;
}

}  // namespace fv::fl
