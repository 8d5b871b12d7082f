#include "fv/signal/frame.hpp"

#include <cmath>

#include "fv/errors.hpp"
#include "fv/signal/pulse.hpp"

namespace fv::signal {
namespace {

constexpr double kTwoPi = 6.283185307179586;

std::vector<double> to_iq_rows(const std::vector<std::complex<double>>& wave) {
  const size_t n = wave.size();
  std::vector<double> iq(2 * n);
  for (size_t i = 0; i < n; ++i) {
    iq[i] = wave[i].real();
    iq[n + i] = wave[i].imag();
  }
  return iq;
}

void snap_to_f32(std::vector<double>& v) {
  for (double& x : v) x = static_cast<double>(static_cast<float>(x));
}

std::vector<double> sinusoid_mix(const NoiseModel& model, int len) {
  std::vector<double> iq(static_cast<size_t>(2 * len), 0.0);
  for (const Tone& t : model.components) {
    for (int n = 0; n < len; ++n) {
      const double arg = t.angular_freq * n + t.phase;
      iq[static_cast<size_t>(n)] += t.amplitude * std::cos(arg);
      iq[static_cast<size_t>(len + n)] += t.amplitude * std::sin(arg);
    }
  }
  return iq;
}

}  // namespace

bool on_snr_grid(int snr_db) {
  return snr_db >= -20 && snr_db <= 18 && snr_db % 2 == 0;
}

std::vector<int> snr_grid(int lo, int hi) {
  std::vector<int> g;
  for (int s = lo; s <= hi; s += 2) g.push_back(s);
  return g;
}

double waveform_power(const std::vector<double>& iq) {
  if (iq.empty()) return 0.0;
  double acc = 0.0;
  for (double v : iq) acc += v * v;
  return acc / static_cast<double>(iq.size() / 2);
}

double measure_snr(const std::vector<double>& signal_iq, const std::vector<double>& noise_iq) {
  if (signal_iq.size() != noise_iq.size()) {
    throw DimensionError("signal/noise length mismatch: " + std::to_string(signal_iq.size()) +
                         " vs " + std::to_string(noise_iq.size()));
  }
  const double ps = waveform_power(signal_iq);
  const double pn = waveform_power(noise_iq);
  if (pn == 0.0) throw InfiniteSnrError("noise power is zero; SNR is unbounded");
  return 10.0 * std::log10(ps / pn);
}

std::vector<double> awgn_for_snr(const std::vector<double>& signal_iq, double target_snr_db,
                                 Rng& rng) {
  const double ps = waveform_power(signal_iq);
  if (ps <= 0.0) throw DegenerateInputError("cannot scale noise against a zero-power signal");
  const double pn = ps * std::pow(10.0, -target_snr_db / 10.0);
  const double sigma = std::sqrt(pn / 2.0);  // per real component
  std::vector<double> noise(signal_iq.size());
  for (double& v : noise) v = sigma * rng.normal();
  return noise;
}

Frame synthesize_frame(Modulation scheme, int snr_db, const ImpairmentSpec& impair, Rng& rng,
                       const SynthesisParams& params) {
  if (!on_snr_grid(snr_db)) {
    throw ConfigError("snr_db " + std::to_string(snr_db) + " is off the 2 dB grid [-20, 18]");
  }
  if (params.frame_len % params.sps != 0) {
    throw ConfigError("frame_len must be a multiple of sps");
  }
  const int nsym = params.frame_len / params.sps;
  const auto bits =
      random_bits(static_cast<size_t>(nsym) * static_cast<size_t>(bits_per_symbol(scheme)), rng);
  const auto symbols = map_symbols(bits, scheme);

  std::vector<std::complex<double>> wave;
  if (is_linear(scheme)) {
    wave = pulse_shape(symbols, params.sps, params.rolloff, params.rrc_span);
  } else if (scheme == Modulation::CPFSK) {
    const std::vector<double> rect(static_cast<size_t>(params.sps), 1.0 / params.sps);
    wave = cpm_waveform(symbols, params.sps, params.mod_index, rect);
  } else {
    const auto pulse = gaussian_freq_pulse(params.sps, params.gfsk_bt);
    wave = cpm_waveform(symbols, params.sps, params.mod_index, pulse);
  }

  if (impair.enabled) {
    const double phase0 = rng.uniform(0.0, impair.max_phase_offset);
    const double cfo = rng.uniform(-impair.max_cfo, impair.max_cfo);
    for (size_t n = 0; n < wave.size(); ++n) {
      const double ph = phase0 + kTwoPi * cfo * static_cast<double>(n);
      wave[n] *= std::complex<double>(std::cos(ph), std::sin(ph));
    }
  }

  std::vector<double> clean = to_iq_rows(wave);
  std::vector<double> noise;
  if (params.noise.kind == NoiseKind::AWGN) {
    noise = awgn_for_snr(clean, static_cast<double>(snr_db), rng);
  } else {
    noise = sinusoid_mix(params.noise, params.frame_len);
  }
  // Pin the realized ratio exactly so every frame meets its labeled SNR.
  const double pn = waveform_power(noise);
  if (pn <= 0.0) throw DegenerateInputError("noise model produced a zero waveform");
  const double want = waveform_power(clean) * std::pow(10.0, -snr_db / 10.0);
  const double fix = std::sqrt(want / pn);
  for (double& v : noise) v *= fix;

  Frame frame;
  frame.label = static_cast<uint8_t>(scheme);
  frame.snr_db = static_cast<int8_t>(snr_db);
  frame.iq.resize(clean.size());
  for (size_t i = 0; i < clean.size(); ++i) frame.iq[i] = clean[i] + noise[i];
  frame.clean = std::move(clean);

  const double p = waveform_power(frame.iq);
  if (p <= 0.0) throw DegenerateInputError("synthesized frame has zero power");
  const double s = 1.0 / std::sqrt(p);
  for (double& v : frame.iq) v *= s;
  for (double& v : frame.clean) v *= s;
  // Keep samples representable in the on-disk f32 payload so a save/load
  // cycle reproduces frames bit for bit.
  snap_to_f32(frame.iq);
  snap_to_f32(frame.clean);
  return frame;
}

Frame normalize_frame(const Frame& frame) {
  const double p = waveform_power(frame.iq);
  if (p <= 0.0) throw DegenerateInputError("cannot normalize a zero-power frame");
  const double s = 1.0 / std::sqrt(p);
  Frame out = frame;
  for (double& v : out.iq) v *= s;
  for (double& v : out.clean) v *= s;
  return out;
}

}  // namespace fv::signal
