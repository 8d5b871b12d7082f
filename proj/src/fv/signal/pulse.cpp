#include "fv/signal/pulse.hpp"

#include <cmath>

#include "fv/errors.hpp"

namespace fv::signal {
namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<double> rrc_taps(int sps, double rolloff, int span_symbols) {
  if (sps < 2) throw ConfigError("pulse shaping needs sps >= 2, got " + std::to_string(sps));
  if (rolloff < 0.0 || rolloff > 1.0) {
    throw ConfigError("rolloff must be in [0,1], got " + std::to_string(rolloff));
  }
  const int half = span_symbols * sps / 2;
  const int n = 2 * half + 1;
  std::vector<double> taps(static_cast<size_t>(n));
  const double b = rolloff;
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i - half) / sps;  // in symbol periods
    double v;
    if (std::abs(t) < 1e-12) {
      v = 1.0 - b + 4.0 * b / kPi;
    } else if (b > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * b)) < 1e-9) {
      v = (b / std::sqrt(2.0)) *
          ((1.0 + 2.0 / kPi) * std::sin(kPi / (4.0 * b)) +
           (1.0 - 2.0 / kPi) * std::cos(kPi / (4.0 * b)));
    } else {
      const double num = std::sin(kPi * t * (1.0 - b)) + 4.0 * b * t * std::cos(kPi * t * (1.0 + b));
      const double den = kPi * t * (1.0 - 16.0 * b * b * t * t);
      v = num / den;
    }
    taps[static_cast<size_t>(i)] = v;
  }
  double energy = 0.0;
  for (double v : taps) energy += v * v;
  const double s = 1.0 / std::sqrt(energy);
  for (double& v : taps) v *= s;
  return taps;
}

std::vector<std::complex<double>> pulse_shape(const std::vector<std::complex<double>>& symbols,
                                              int sps, double rolloff, int span_symbols) {
  const auto taps = rrc_taps(sps, rolloff, span_symbols);
  const int half = static_cast<int>(taps.size()) / 2;
  const int nsym = static_cast<int>(symbols.size());
  const int out_len = nsym * sps;
  std::vector<std::complex<double>> out(static_cast<size_t>(out_len), {0.0, 0.0});
  for (int j = 0; j < nsym; ++j) {
    const std::complex<double> s = symbols[static_cast<size_t>(j)];
    const int base = j * sps - half;  // tap k lands on output sample base + k
    const int k_lo = std::max(0, -base);
    const int k_hi = std::min(static_cast<int>(taps.size()), out_len - base);
    for (int k = k_lo; k < k_hi; ++k) {
      out[static_cast<size_t>(base + k)] += s * taps[static_cast<size_t>(k)];
    }
  }
  return out;
}

std::vector<double> gaussian_freq_pulse(int sps, double bt, int span_symbols) {
  if (sps < 2) throw ConfigError("pulse shaping needs sps >= 2, got " + std::to_string(sps));
  // Gaussian kernel sampled over +/- span/2 symbol periods.
  const int half = span_symbols * sps / 2;
  std::vector<double> kernel(static_cast<size_t>(2 * half + 1));
  const double a = 2.0 * kPi * kPi * bt * bt / std::log(2.0);
  double ksum = 0.0;
  for (int i = -half; i <= half; ++i) {
    const double t = static_cast<double>(i) / sps;
    const double v = std::exp(-a * t * t);
    kernel[static_cast<size_t>(i + half)] = v;
    ksum += v;
  }
  for (double& v : kernel) v /= ksum;
  // Convolve with the one-symbol rectangle (height 1/sps) so the pulse sums
  // to exactly 1 over its support.
  std::vector<double> pulse(kernel.size() + static_cast<size_t>(sps) - 1, 0.0);
  for (size_t k = 0; k < kernel.size(); ++k) {
    for (int r = 0; r < sps; ++r) pulse[k + static_cast<size_t>(r)] += kernel[k] / sps;
  }
  return pulse;
}

std::vector<std::complex<double>> cpm_waveform(const std::vector<std::complex<double>>& freq_symbols,
                                               int sps, double mod_index,
                                               const std::vector<double>& freq_pulse) {
  const int nsym = static_cast<int>(freq_symbols.size());
  const int out_len = nsym * sps;
  const int center = static_cast<int>(freq_pulse.size()) / 2;
  // Instantaneous frequency = superposition of per-symbol pulses.
  std::vector<double> finst(static_cast<size_t>(out_len), 0.0);
  for (int j = 0; j < nsym; ++j) {
    const double f = freq_symbols[static_cast<size_t>(j)].real();
    const int base = j * sps + sps / 2 - center;
    const int k_lo = std::max(0, -base);
    const int k_hi = std::min(static_cast<int>(freq_pulse.size()), out_len - base);
    for (int k = k_lo; k < k_hi; ++k) {
      finst[static_cast<size_t>(base + k)] += f * freq_pulse[static_cast<size_t>(k)];
    }
  }
  std::vector<std::complex<double>> out(static_cast<size_t>(out_len));
  double phase = 0.0;
  for (int n = 0; n < out_len; ++n) {
    out[static_cast<size_t>(n)] = {std::cos(phase), std::sin(phase)};
    phase += kPi * mod_index * finst[static_cast<size_t>(n)];
  }
  return out;
}

}  // namespace fv::signal
