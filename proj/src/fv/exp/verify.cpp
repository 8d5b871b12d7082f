#include "fv/exp/verify.hpp"

#include <cmath>
#include <functional>

#include "fv/data/divergence.hpp"
#include "fv/fl/aggregate.hpp"
#include "fv/nn/model.hpp"
#include "fv/signal/frame.hpp"

namespace fv::exp {
namespace {

constexpr double kStep = 1e-4;
constexpr double kGradTol = 1e-4;

double rel_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-4});
  return std::abs(analytic - numeric) / denom;
}

std::vector<double> random_vec(size_t n, Rng& rng, double margin = 0.0) {
  std::vector<double> v(n);
  for (double& x : v) {
    do {
      x = rng.uniform(-1.0, 1.0);
    } while (margin > 0.0 && std::abs(x) < margin);
  }
  return v;
}

// Scalar objective J = sum(output * probe); FD perturbs one slot of `subject`
// while analytic gradients come from the layer's backward kernel.
double fd_max_rel_error(std::vector<double>& subject, const std::vector<double>& analytic,
                        const std::function<double()>& objective) {
  double worst = 0.0;
  for (size_t i = 0; i < subject.size(); ++i) {
    const double keep = subject[i];
    subject[i] = keep + kStep;
    const double plus = objective();
    subject[i] = keep - kStep;
    const double minus = objective();
    subject[i] = keep;
    const double numeric = (plus - minus) / (2.0 * kStep);
    worst = std::max(worst, rel_error(analytic[i], numeric));
  }
  return worst;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double check_conv(uint64_t seed, nn::Padding pad) {
  Rng rng(seed);
  nn::LayerSpec spec = nn::LayerSpec::conv2d(2, 3, 2, 3, pad);
  nn::FeatShape in;
  in.channels = 2;
  in.h = 2;
  in.w = 8;
  const int batch = 3;
  const nn::ConvDims d = nn::conv_dims(spec, in, batch);
  const size_t x_n = static_cast<size_t>(batch) * in.count();
  const size_t y_n = static_cast<size_t>(batch) * d.out_ch * d.out_h * d.out_w;
  std::vector<double> x = random_vec(x_n, rng);
  std::vector<double> w = random_vec(static_cast<size_t>(d.out_ch) * d.in_ch * d.kh * d.kw, rng);
  std::vector<double> b = random_vec(static_cast<size_t>(d.out_ch), rng);
  std::vector<double> probe = random_vec(y_n, rng);

  std::vector<double> y(y_n);
  auto objective = [&] {
    nn::conv2d_forward(d, x.data(), w.data(), b.data(), y.data());
    return dot(y, probe);
  };
  objective();
  std::vector<double> dx(x_n, 0.0), dw(w.size(), 0.0), db(b.size(), 0.0);
  nn::conv2d_backward(d, x.data(), w.data(), probe.data(), dx.data(), dw.data(), db.data());

  double worst = fd_max_rel_error(w, dw, objective);
  worst = std::max(worst, fd_max_rel_error(b, db, objective));
  worst = std::max(worst, fd_max_rel_error(x, dx, objective));
  return worst;
}

double check_dense(uint64_t seed) {
  Rng rng(seed);
  const int n = 3, in_f = 6, out_f = 5;
  std::vector<double> x = random_vec(static_cast<size_t>(n) * in_f, rng);
  std::vector<double> w = random_vec(static_cast<size_t>(in_f) * out_f, rng);
  std::vector<double> b = random_vec(static_cast<size_t>(out_f), rng);
  std::vector<double> probe = random_vec(static_cast<size_t>(n) * out_f, rng);
  std::vector<double> y(static_cast<size_t>(n) * out_f);
  auto objective = [&] {
    nn::dense_forward(n, in_f, out_f, x.data(), w.data(), b.data(), y.data());
    return dot(y, probe);
  };
  objective();
  std::vector<double> dx(x.size(), 0.0), dw(w.size(), 0.0), db(b.size(), 0.0);
  nn::dense_backward(n, in_f, out_f, x.data(), w.data(), probe.data(), dx.data(), dw.data(),
                     db.data());
  double worst = fd_max_rel_error(w, dw, objective);
  worst = std::max(worst, fd_max_rel_error(b, db, objective));
  worst = std::max(worst, fd_max_rel_error(x, dx, objective));
  return worst;
}

double check_relu(uint64_t seed) {
  Rng rng(seed);
  const size_t n = 24;
  // Keep inputs away from the kink so the difference quotient is exact.
  std::vector<double> x = random_vec(n, rng, 1e-2);
  std::vector<double> probe = random_vec(n, rng);
  std::vector<double> y(n);
  auto objective = [&] {
    nn::relu_forward(n, x.data(), y.data());
    return dot(y, probe);
  };
  objective();
  std::vector<double> dx(n, 0.0);
  nn::relu_backward(n, x.data(), probe.data(), dx.data());
  return fd_max_rel_error(x, dx, objective);
}

double check_dropout(uint64_t seed) {
  Rng rng(seed);
  const size_t n = 24;
  std::vector<double> x = random_vec(n, rng);
  std::vector<double> probe = random_vec(n, rng);
  std::vector<double> mask(n);
  Rng mask_rng(seed ^ 0xabcdef);
  nn::dropout_mask(n, 0.5, mask_rng, mask.data());
  std::vector<double> y(n);
  auto objective = [&] {
    nn::dropout_forward(n, x.data(), mask.data(), y.data());
    return dot(y, probe);
  };
  objective();
  std::vector<double> dx(n, 0.0);
  nn::dropout_backward(n, probe.data(), mask.data(), dx.data());
  return fd_max_rel_error(x, dx, objective);
}

double check_softmax(uint64_t seed) {
  Rng rng(seed);
  const int n = 3, c = 5;
  std::vector<double> x = random_vec(static_cast<size_t>(n) * c, rng);
  std::vector<double> probe = random_vec(static_cast<size_t>(n) * c, rng);
  std::vector<double> y(static_cast<size_t>(n) * c);
  auto objective = [&] {
    nn::softmax_forward(n, c, x.data(), y.data());
    return dot(y, probe);
  };
  objective();
  std::vector<double> dx(x.size(), 0.0);
  nn::softmax_backward(n, c, y.data(), probe.data(), dx.data());
  return fd_max_rel_error(x, dx, objective);
}

double check_flatten(uint64_t seed) {
  // Flatten is a reshape; its gradient is the identity map.
  Rng rng(seed);
  const size_t n = 16;
  std::vector<double> x = random_vec(n, rng);
  std::vector<double> probe = random_vec(n, rng);
  auto objective = [&] { return dot(x, probe); };
  return fd_max_rel_error(x, probe, objective);
}

}  // namespace

std::vector<GradientCheckCase> gradient_check_layers(uint64_t seed) {
  return {
      {"dense", check_dense(seed)},
      {"conv2d-same", check_conv(seed, nn::Padding::Same)},
      {"conv2d-valid", check_conv(seed, nn::Padding::Valid)},
      {"relu", check_relu(seed)},
      {"dropout", check_dropout(seed)},
      {"softmax", check_softmax(seed)},
      {"flatten", check_flatten(seed)},
  };
}

double gradient_check_model(uint64_t seed) {
  const int classes = 3;
  const int frame_len = 16;
  const auto stack = nn::classifier_stack(classes, frame_len, /*dense_width=*/8);
  const auto input = nn::input_shape(frame_len);
  nn::ModelParams params = nn::init_model(stack, input, seed);

  Rng data_rng(seed ^ 0x77);
  const int batch = 3;
  nn::Tensor x({batch, 2, frame_len});
  for (double& v : x.data) v = data_rng.uniform(-1.0, 1.0);
  std::vector<int> labels(batch);
  for (int& l : labels) l = static_cast<int>(data_rng.below(classes));

  auto loss_at = [&](const nn::ModelParams& p) {
    Rng rng(seed ^ 0x1234);  // same dropout masks for every evaluation
    nn::Tensor logits = nn::forward(p, stack, input, x, /*train_mode=*/true, rng);
    return nn::cross_entropy(logits, labels).loss;
  };

  Rng bw_rng(seed ^ 0x1234);
  nn::BackwardResult bw = nn::backward(params, stack, input, x, labels, bw_rng);

  double worst = 0.0;
  for (size_t l = 0; l < params.layers.size(); ++l) {
    for (size_t t = 0; t < params.layers[l].tensors.size(); ++t) {
      nn::Tensor& tensor = params.layers[l].tensors[t];
      const nn::Tensor& grad = bw.grads.layers[l].tensors[t];
      // Every 7th slot keeps the sweep fast while touching each tensor.
      for (size_t k = 0; k < tensor.size(); k += 7) {
        const double keep = tensor.data[k];
        tensor.data[k] = keep + kStep;
        const double plus = loss_at(params);
        tensor.data[k] = keep - kStep;
        const double minus = loss_at(params);
        tensor.data[k] = keep;
        const double numeric = (plus - minus) / (2.0 * kStep);
        worst = std::max(worst, rel_error(grad.data[k], numeric));
      }
    }
  }
  return worst;
}

std::vector<CheckResult> run_verification() {
  std::vector<CheckResult> out;

  {
    CheckResult r{"gradient-oracle", true, ""};
    for (uint64_t seed : {11u, 22u, 33u}) {
      for (const auto& c : gradient_check_layers(seed)) {
        if (c.max_rel_error >= kGradTol) {
          r.passed = false;
          r.detail = c.name + " rel error " + std::to_string(c.max_rel_error);
        }
      }
      const double m = gradient_check_model(seed);
      if (m >= kGradTol) {
        r.passed = false;
        r.detail = "model rel error " + std::to_string(m);
      }
    }
    out.push_back(r);
  }

  {
    CheckResult r{"snr-calibration", true, ""};
    signal::ImpairmentSpec impair;
    for (int s = 0; s < signal::kModulationCount && r.passed; ++s) {
      const auto scheme = static_cast<signal::Modulation>(s);
      for (int snr : signal::snr_grid()) {
        for (int i = 0; i < 20; ++i) {
          Rng rng = derive_rng(99, "verify-frame", static_cast<uint64_t>(s),
                               static_cast<uint64_t>(snr + 100), static_cast<uint64_t>(i));
          auto f = signal::synthesize_frame(scheme, snr, impair, rng);
          std::vector<double> noise(f.iq.size());
          for (size_t k = 0; k < noise.size(); ++k) noise[k] = f.iq[k] - f.clean[k];
          const double measured = signal::measure_snr(f.clean, noise);
          if (std::abs(measured - snr) > 0.5) {
            r.passed = false;
            r.detail = std::string(signal::modulation_name(scheme)) + " at " +
                       std::to_string(snr) + " dB measured " + std::to_string(measured);
            break;
          }
        }
        if (!r.passed) break;
      }
    }
    out.push_back(r);
  }

  {
    CheckResult r{"divergence-algebra", true, ""};
    const double kl = data::kl_divergence({0.5, 0.5}, {0.25, 0.75});
    const double js = data::js_divergence({0.5, 0.5}, {0.25, 0.75});
    if (std::abs(kl - 0.14384103622589045) > 1e-12) {
      r.passed = false;
      r.detail = "kl " + std::to_string(kl);
    }
    if (std::abs(js - 0.03382207556860521) > 1e-12) {
      r.passed = false;
      r.detail = "js " + std::to_string(js);
    }
    Rng rng(7);
    for (int trial = 0; trial < 100 && r.passed; ++trial) {
      std::vector<double> p(8), q(8);
      double ps = 0.0, qs = 0.0;
      for (size_t i = 0; i < 8; ++i) {
        p[i] = rng.uniform() + 1e-3;
        q[i] = rng.uniform() + 1e-3;
        ps += p[i];
        qs += q[i];
      }
      for (size_t i = 0; i < 8; ++i) {
        p[i] /= ps;
        q[i] /= qs;
      }
      const double a = data::js_divergence(p, q);
      const double b = data::js_divergence(q, p);
      if (std::abs(a - b) > 1e-12 || a < 0.0 || a > std::log(2.0) + 1e-12) {
        r.passed = false;
        r.detail = "symmetry/bounds violated";
      }
    }
    out.push_back(r);
  }

  {
    CheckResult r{"aggregation-algebra", true, ""};
    Rng rng(13);
    for (int trial = 0; trial < 20 && r.passed; ++trial) {
      const int members = 1 + static_cast<int>(rng.below(5));
      nn::ModelParams prev;
      prev.layers.resize(2);
      prev.layers[0].tensors.emplace_back(std::vector<int>{3, 4});
      prev.layers[1].tensors.emplace_back(std::vector<int>{5});
      prev.for_each([&](nn::Tensor& t) {
        for (double& v : t.data) v = rng.uniform(-1.0, 1.0);
      });
      std::vector<nn::ModelParams> ws(static_cast<size_t>(members), prev);
      std::vector<double> deltas(static_cast<size_t>(members));
      double total = 0.0;
      for (int m = 0; m < members; ++m) {
        ws[static_cast<size_t>(m)].for_each([&](nn::Tensor& t) {
          for (double& v : t.data) v = rng.uniform(-1.0, 1.0);
        });
        deltas[static_cast<size_t>(m)] = 1.0 + rng.below(50);
        total += deltas[static_cast<size_t>(m)];
      }
      std::vector<fl::WeightedParams> inputs;
      for (int m = 0; m < members; ++m) {
        inputs.push_back({&ws[static_cast<size_t>(m)], deltas[static_cast<size_t>(m)]});
      }
      nn::ModelParams got = fl::aggregate_fedvaccine(prev, inputs);
      // Closed form, element by element.
      for (size_t l = 0; l < prev.layers.size() && r.passed; ++l) {
        for (size_t t = 0; t < prev.layers[l].tensors.size(); ++t) {
          for (size_t k = 0; k < prev.layers[l].tensors[t].size(); ++k) {
            double want = 0.0;
            for (int m = 0; m < members; ++m) {
              const double rho = deltas[static_cast<size_t>(m)] / total;
              want += (1.0 - rho) * prev.layers[l].tensors[t].data[k] +
                      rho * ws[static_cast<size_t>(m)].layers[l].tensors[t].data[k];
            }
            want /= members;
            if (std::abs(want - got.layers[l].tensors[t].data[k]) > 1e-6) {
              r.passed = false;
              r.detail = "cluster blend differs from closed form";
            }
          }
        }
      }
    }
    out.push_back(r);
  }

  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results) {
    if (!r.passed) return false;
  }
  return true;
}

}  // namespace fv::exp
