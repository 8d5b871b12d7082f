#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "fv/rng.hpp"

namespace fv::signal {

// Digital scheme set. Enum order is the canonical class ordinal (0..7).
enum class Modulation : uint8_t {
  BPSK = 0,
  QPSK = 1,
  PSK8 = 2,
  PAM4 = 3,
  QAM16 = 4,
  QAM64 = 5,
  CPFSK = 6,
  GFSK = 7,
};

constexpr int kModulationCount = 8;

const char* modulation_name(Modulation m);
Modulation modulation_from_name(const std::string& name);

int bits_per_symbol(Modulation m);
bool is_linear(Modulation m);  // false for the continuous-phase schemes

// Constellation points in bit-pattern order, unit average symbol energy.
// Only valid for linear schemes.
const std::vector<std::complex<double>>& constellation(Modulation m);

// Maps a bit sequence to symbols. Linear schemes return constellation points;
// CPFSK/GFSK return the +/-1 frequency-symbol sequence (imaginary part zero).
// Throws LengthError when the bit count is not a multiple of bits-per-symbol.
std::vector<std::complex<double>> map_symbols(const std::vector<uint8_t>& bits, Modulation m);

std::vector<uint8_t> random_bits(size_t count, Rng& rng);

}  // namespace fv::signal
