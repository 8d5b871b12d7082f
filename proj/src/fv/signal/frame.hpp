#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fv/rng.hpp"
#include "fv/signal/modulation.hpp"

namespace fv::signal {

// One labeled I/Q frame. iq is a flattened 2 x len matrix (row 0 in-phase,
// row 1 quadrature). clean keeps the noise-free component for SNR checks and
// is dropped when frames are written to disk.
struct Frame {
  std::vector<double> iq;
  std::vector<double> clean;  // empty when not retained
  uint8_t label = 0;
  int8_t snr_db = 0;

  int length() const { return static_cast<int>(iq.size() / 2); }
  bool has_clean() const { return !clean.empty(); }
};

enum class NoiseKind : uint8_t { AWGN = 0, SINUSOIDAL_MIX = 1 };

struct Tone {
  double amplitude = 0.0;
  double angular_freq = 0.0;  // radians per sample
  double phase = 0.0;
};

struct NoiseModel {
  NoiseKind kind = NoiseKind::AWGN;
  std::vector<Tone> components;  // SINUSOIDAL_MIX only
};

struct ImpairmentSpec {
  bool enabled = true;
  double max_phase_offset = 6.283185307179586;  // full carrier-phase ambiguity
  double max_cfo = 0.01;                        // cycles per sample
};

// dB grid used throughout: even values in [-20, 18].
bool on_snr_grid(int snr_db);
std::vector<int> snr_grid(int lo = -20, int hi = 18);

// Mean squared magnitude of a 2 x len waveform.
double waveform_power(const std::vector<double>& iq);

// 10*log10(P_signal / P_noise). Throws InfiniteSnrError when the noise is
// identically zero and DimensionError on length mismatch.
double measure_snr(const std::vector<double>& signal_iq, const std::vector<double>& noise_iq);

// Gaussian noise whose expected power makes signal+noise hit the target SNR.
// Per-component variance comes from the measured signal power.
std::vector<double> awgn_for_snr(const std::vector<double>& signal_iq, double target_snr_db,
                                 Rng& rng);

// Deterministic full pipeline: random bits -> symbols -> pulse shaping (or
// continuous-phase integration) -> impairments -> noise pinned exactly at the
// target SNR -> unit-power normalization. The per-frame stream should come
// from derive_rng(seed, "pool", scheme, snr, index) so frames are independent
// of generation order.
struct SynthesisParams {
  int frame_len = 128;
  int sps = 8;
  double rolloff = 0.35;
  int rrc_span = 8;
  double gfsk_bt = 0.35;
  double mod_index = 0.5;
  NoiseModel noise;
};

Frame synthesize_frame(Modulation scheme, int snr_db, const ImpairmentSpec& impair, Rng& rng,
                       const SynthesisParams& params = {});

// Rescales iq (and clean, when present) to unit mean power. Label and SNR are
// untouched. Throws DegenerateInputError on a zero frame.
Frame normalize_frame(const Frame& frame);

}  // namespace fv::signal
