#pragma once

#include <complex>
#include <vector>

namespace fv::signal {

// Root-raised-cosine taps, odd length span*sps + 1, energy-normalized
// (sum of squared taps = 1). Throws ConfigError for sps < 2.
std::vector<double> rrc_taps(int sps, double rolloff, int span_symbols = 8);

// Upsample-by-sps impulse train filtered with the RRC; output length is
// exactly symbols.size() * sps, aligned so output[0] sits under the filter
// center of the first symbol.
std::vector<std::complex<double>> pulse_shape(const std::vector<std::complex<double>>& symbols,
                                              int sps, double rolloff,
                                              int span_symbols = 8);

// Gaussian frequency pulse for GFSK: rectangular symbol pulse convolved with
// a Gaussian of the given bandwidth-time product, normalized to unit sum.
std::vector<double> gaussian_freq_pulse(int sps, double bt, int span_symbols = 4);

// Continuous-phase waveform from +/-1 frequency symbols. freq_pulse must sum
// to 1 so each symbol advances the phase by pi * mod_index.
std::vector<std::complex<double>> cpm_waveform(const std::vector<std::complex<double>>& freq_symbols,
                                               int sps, double mod_index,
                                               const std::vector<double>& freq_pulse);

}  // namespace fv::signal
