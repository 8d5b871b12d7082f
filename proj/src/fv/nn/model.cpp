#include "fv/nn/model.hpp"

#include <cmath>

#include "fv/errors.hpp"

namespace fv::nn {

bool ModelParams::same_shapes(const ModelParams& o) const {
  if (layers.size() != o.layers.size()) return false;
  for (size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].tensors.size() != o.layers[i].tensors.size()) return false;
    for (size_t j = 0; j < layers[i].tensors.size(); ++j) {
      if (layers[i].tensors[j].shape != o.layers[i].tensors[j].shape) return false;
    }
  }
  return true;
}

size_t ModelParams::tensor_count() const {
  size_t n = 0;
  for (const auto& l : layers) n += l.tensors.size();
  return n;
}

std::vector<LayerSpec> classifier_stack(int classes, int frame_len, int dense_width,
                                        double dropout_rate) {
  const int flat = 32 * 1 * (frame_len - 2);
  return {
      LayerSpec::conv2d(1, 16, 1, 3, Padding::Same),
      LayerSpec::relu(),
      LayerSpec::dropout(dropout_rate),
      LayerSpec::conv2d(16, 32, 2, 3, Padding::Valid),
      LayerSpec::relu(),
      LayerSpec::dropout(dropout_rate),
      LayerSpec::flatten(),
      LayerSpec::dense(flat, dense_width),
      LayerSpec::relu(),
      LayerSpec::dense(dense_width, classes),
  };
}

FeatShape input_shape(int frame_len) {
  FeatShape s;
  s.channels = 1;
  s.h = 2;
  s.w = frame_len;
  return s;
}

std::vector<FeatShape> validate_stack(const std::vector<LayerSpec>& spec, const FeatShape& input) {
  std::vector<FeatShape> shapes;
  shapes.reserve(spec.size() + 1);
  shapes.push_back(input);
  for (size_t i = 0; i < spec.size(); ++i) {
    shapes.push_back(infer_shape(spec[i], shapes.back(), static_cast<int>(i)));
  }
  return shapes;
}

ModelParams init_model(const std::vector<LayerSpec>& spec, const FeatShape& input, uint64_t seed) {
  validate_stack(spec, input);
  ModelParams params;
  params.layers.resize(spec.size());
  for (size_t i = 0; i < spec.size(); ++i) {
    const LayerSpec& s = spec[i];
    Rng rng = derive_rng(seed, "init-layer", i);
    if (s.kind == LayerKind::Conv2D) {
      Tensor w({s.out_channels, s.in_channels, s.kernel_h, s.kernel_w});
      Tensor b({s.out_channels});
      const double a = 1.0 / std::sqrt(static_cast<double>(s.in_channels) * s.kernel_h * s.kernel_w);
      for (double& v : w.data) v = rng.uniform(-a, a);
      params.layers[i].tensors = {std::move(w), std::move(b)};
    } else if (s.kind == LayerKind::Dense) {
      Tensor w({s.in_features, s.out_features});
      Tensor b({s.out_features});
      const double a = 1.0 / std::sqrt(static_cast<double>(s.in_features));
      for (double& v : w.data) v = rng.uniform(-a, a);
      params.layers[i].tensors = {std::move(w), std::move(b)};
    }
  }
  return params;
}

namespace {

struct Trace {
  std::vector<Tensor> acts;   // acts[i] is the input of layer i; back() is output
  std::vector<Tensor> masks;  // dropout masks, empty for other layers
};

Trace run_forward(const ModelParams& params, const std::vector<LayerSpec>& spec,
                  const std::vector<FeatShape>& shapes, const Tensor& batch, bool train_mode,
                  Rng& rng) {
  const int n = batch.shape[0];
  Trace tr;
  tr.acts.reserve(spec.size() + 1);
  tr.masks.resize(spec.size());
  tr.acts.push_back(batch);
  for (size_t i = 0; i < spec.size(); ++i) {
    const LayerSpec& s = spec[i];
    const FeatShape& in_sh = shapes[i];
    const FeatShape& out_sh = shapes[i + 1];
    const Tensor& x = tr.acts.back();
    Tensor y({n, static_cast<int>(out_sh.count())});
    switch (s.kind) {
      case LayerKind::Conv2D: {
        const ConvDims d = conv_dims(s, in_sh, n);
        conv2d_forward(d, x.ptr(), params.layers[i].tensors[0].ptr(),
                       params.layers[i].tensors[1].ptr(), y.ptr());
        break;
      }
      case LayerKind::Dense:
        dense_forward(n, s.in_features, s.out_features, x.ptr(),
                      params.layers[i].tensors[0].ptr(), params.layers[i].tensors[1].ptr(),
                      y.ptr());
        break;
      case LayerKind::ReLU:
        relu_forward(x.size(), x.ptr(), y.ptr());
        break;
      case LayerKind::Dropout: {
        if (train_mode && s.rate > 0.0) {
          Tensor mask({n, static_cast<int>(out_sh.count())});
          dropout_mask(mask.size(), s.rate, rng, mask.ptr());
          dropout_forward(x.size(), x.ptr(), mask.ptr(), y.ptr());
          tr.masks[i] = std::move(mask);
        } else {
          y.data = x.data;
        }
        break;
      }
      case LayerKind::Flatten:
        y.data = x.data;
        break;
      case LayerKind::Softmax:
        softmax_forward(n, static_cast<int>(out_sh.count()), x.ptr(), y.ptr());
        break;
    }
    tr.acts.push_back(std::move(y));
  }
  return tr;
}

void check_finite(const Tensor& t, const char* what) {
  for (double v : t.data) {
    if (!std::isfinite(v)) throw DegenerateInputError(std::string(what) + " is not finite");
  }
}

}  // namespace

Tensor forward(const ModelParams& params, const std::vector<LayerSpec>& spec,
               const FeatShape& input, const Tensor& batch, bool train_mode, Rng& rng) {
  if (params.layers.size() != spec.size()) throw DimensionError("params/spec layer count mismatch");
  const auto shapes = validate_stack(spec, input);
  if (batch.shape.empty() ||
      Tensor::count(batch.shape) !=
          static_cast<size_t>(batch.shape[0]) * input.count()) {
    throw DimensionError("batch shape " + batch.shape_str() + " does not match model input");
  }
  Trace tr = run_forward(params, spec, shapes, batch, train_mode, rng);
  return std::move(tr.acts.back());
}

CrossEntropy cross_entropy(const Tensor& logits, const std::vector<int>& labels) {
  const int n = logits.shape[0];
  const int c = logits.shape[1];
  if (static_cast<size_t>(n) != labels.size()) {
    throw DimensionError("logit rows do not match label count");
  }
  CrossEntropy out;
  out.dlogits = Tensor({n, c});
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const int y = labels[static_cast<size_t>(i)];
    if (y < 0 || y >= c) throw LabelError("label " + std::to_string(y) + " outside [0, C)");
    const double* row = logits.ptr() + static_cast<size_t>(i) * c;
    double* grow = out.dlogits.ptr() + static_cast<size_t>(i) * c;
    double mx = row[0];
    for (int j = 1; j < c; ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (int j = 0; j < c; ++j) sum += std::exp(row[j] - mx);
    const double logz = mx + std::log(sum);
    total += logz - row[y];
    for (int j = 0; j < c; ++j) grow[j] = std::exp(row[j] - logz) / n;
    grow[y] -= 1.0 / n;
  }
  out.loss = total / n;
  return out;
}

BackwardResult backward(const ModelParams& params, const std::vector<LayerSpec>& spec,
                        const FeatShape& input, const Tensor& batch, const std::vector<int>& labels,
                        Rng& rng) {
  const auto shapes = validate_stack(spec, input);
  const int n = batch.shape[0];
  Trace tr = run_forward(params, spec, shapes, batch, /*train_mode=*/true, rng);

  BackwardResult out;
  out.logits = tr.acts.back();
  check_finite(out.logits, "logits");
  CrossEntropy ce = cross_entropy(out.logits, labels);
  out.loss = ce.loss;

  out.grads.layers.resize(spec.size());
  for (size_t i = 0; i < spec.size(); ++i) {
    for (const Tensor& t : params.layers[i].tensors) {
      out.grads.layers[i].tensors.emplace_back(t.shape);
    }
  }

  Tensor delta = std::move(ce.dlogits);
  for (size_t ri = spec.size(); ri-- > 0;) {
    const LayerSpec& s = spec[ri];
    const FeatShape& in_sh = shapes[ri];
    const Tensor& x = tr.acts[ri];
    Tensor dx({n, static_cast<int>(in_sh.count())});
    switch (s.kind) {
      case LayerKind::Conv2D: {
        const ConvDims d = conv_dims(s, in_sh, n);
        conv2d_backward(d, x.ptr(), params.layers[ri].tensors[0].ptr(), delta.ptr(), dx.ptr(),
                        out.grads.layers[ri].tensors[0].ptr(),
                        out.grads.layers[ri].tensors[1].ptr());
        break;
      }
      case LayerKind::Dense:
        dense_backward(n, s.in_features, s.out_features, x.ptr(),
                       params.layers[ri].tensors[0].ptr(), delta.ptr(), dx.ptr(),
                       out.grads.layers[ri].tensors[0].ptr(),
                       out.grads.layers[ri].tensors[1].ptr());
        break;
      case LayerKind::ReLU:
        relu_backward(x.size(), x.ptr(), delta.ptr(), dx.ptr());
        break;
      case LayerKind::Dropout:
        if (tr.masks[ri].size() > 0) {
          dropout_backward(x.size(), delta.ptr(), tr.masks[ri].ptr(), dx.ptr());
        } else {
          dx.data = delta.data;
        }
        break;
      case LayerKind::Flatten:
        dx.data = delta.data;
        break;
      case LayerKind::Softmax:
        softmax_backward(n, static_cast<int>(in_sh.count()), tr.acts[ri + 1].ptr(), delta.ptr(),
                         dx.ptr());
        break;
    }
    delta = std::move(dx);
  }
  return out;
}

Tensor frames_to_batch(const std::vector<const signal::Frame*>& frames, int frame_len) {
  const int n = static_cast<int>(frames.size());
  Tensor batch({n, 2, frame_len});
  const size_t per = static_cast<size_t>(2 * frame_len);
  for (int i = 0; i < n; ++i) {
    const auto& iq = frames[static_cast<size_t>(i)]->iq;
    if (iq.size() != per) throw DimensionError("frame length mismatch in batch");
    std::copy(iq.begin(), iq.end(), batch.data.begin() + static_cast<size_t>(i) * per);
  }
  return batch;
}

EvalResult evaluate(const ModelParams& params, const std::vector<LayerSpec>& spec,
                    const FeatShape& input, const std::vector<const signal::Frame*>& frames,
                    int batch_size) {
  if (frames.empty()) throw EmptyInputError("evaluate needs a nonempty dataset");
  EvalResult res;
  res.predictions.reserve(frames.size());
  std::map<int, std::pair<int, int>> per_snr;  // snr -> (correct, total)
  Rng eval_rng(0);                             // dropout stays off in eval mode
  double loss_sum = 0.0;
  size_t correct = 0;
  const int frame_len = input.w;
  for (size_t start = 0; start < frames.size(); start += static_cast<size_t>(batch_size)) {
    const size_t end = std::min(frames.size(), start + static_cast<size_t>(batch_size));
    std::vector<const signal::Frame*> chunk(frames.begin() + static_cast<long>(start),
                                            frames.begin() + static_cast<long>(end));
    Tensor batch = frames_to_batch(chunk, frame_len);
    std::vector<int> labels(chunk.size());
    for (size_t i = 0; i < chunk.size(); ++i) labels[i] = chunk[i]->label;
    Tensor logits = forward(params, spec, input, batch, /*train_mode=*/false, eval_rng);
    CrossEntropy ce = cross_entropy(logits, labels);
    loss_sum += ce.loss * static_cast<double>(chunk.size());
    const int c = logits.shape[1];
    for (size_t i = 0; i < chunk.size(); ++i) {
      const double* row = logits.ptr() + i * static_cast<size_t>(c);
      int arg = 0;
      for (int j = 1; j < c; ++j) {
        if (row[j] > row[arg]) arg = j;
      }
      res.predictions.push_back(arg);
      auto& cell = per_snr[chunk[i]->snr_db];
      cell.second += 1;
      if (arg == labels[i]) {
        cell.first += 1;
        ++correct;
      }
    }
  }
  res.accuracy = static_cast<double>(correct) / static_cast<double>(frames.size());
  res.loss = loss_sum / static_cast<double>(frames.size());
  for (const auto& [snr, cell] : per_snr) {
    res.per_snr_accuracy[snr] = static_cast<double>(cell.first) / cell.second;
  }
  return res;
}

}  // namespace fv::nn
