#include "fv/signal/modulation.hpp"

#include <cmath>

#include "fv/errors.hpp"

namespace fv::signal {
namespace {

constexpr double kPi = 3.14159265358979323846;

int gray_index(int g, int levels) {
  // Index of gray-coded value g within a monotone level ladder.
  for (int i = 0; i < levels; ++i) {
    int gi = i ^ (i >> 1);
    if (gi == g) return i;
  }
  return 0;
}

std::vector<std::complex<double>> build_psk(int order) {
  std::vector<std::complex<double>> pts(order);
  for (int g = 0; g < order; ++g) {
    int k = gray_index(g, order);
    double ph = 2.0 * kPi * k / order;
    pts[g] = {std::cos(ph), std::sin(ph)};
  }
  return pts;
}

std::vector<std::complex<double>> build_pam4() {
  // Gray levels -3,-1,+1,+3 scaled to unit mean energy (E = 5).
  const double s = 1.0 / std::sqrt(5.0);
  std::vector<std::complex<double>> pts(4);
  for (int g = 0; g < 4; ++g) {
    int k = gray_index(g, 4);
    pts[g] = {(2.0 * k - 3.0) * s, 0.0};
  }
  return pts;
}

std::vector<std::complex<double>> build_qam(int bits_per_axis) {
  const int levels = 1 << bits_per_axis;
  const int order = levels * levels;
  // Mean energy of one +/-odd ladder: (levels^2 - 1) / 3 per axis.
  const double axis_energy = (levels * levels - 1) / 3.0;
  const double s = 1.0 / std::sqrt(2.0 * axis_energy);
  std::vector<std::complex<double>> pts(order);
  for (int g = 0; g < order; ++g) {
    int gi = g >> bits_per_axis;       // first bits -> I
    int gq = g & (levels - 1);         // remaining -> Q
    int ki = gray_index(gi, levels);
    int kq = gray_index(gq, levels);
    pts[g] = {(2.0 * ki - (levels - 1)) * s, (2.0 * kq - (levels - 1)) * s};
  }
  return pts;
}

}  // namespace

const char* modulation_name(Modulation m) {
  switch (m) {
    case Modulation::BPSK: return "bpsk";
    case Modulation::QPSK: return "qpsk";
    case Modulation::PSK8: return "8psk";
    case Modulation::PAM4: return "pam4";
    case Modulation::QAM16: return "qam16";
    case Modulation::QAM64: return "qam64";
    case Modulation::CPFSK: return "cpfsk";
    case Modulation::GFSK: return "gfsk";
  }
  return "?";
}

Modulation modulation_from_name(const std::string& name) {
  for (int i = 0; i < kModulationCount; ++i) {
    auto m = static_cast<Modulation>(i);
    if (name == modulation_name(m)) return m;
  }
  throw ConfigError("unknown modulation scheme: " + name);
}

int bits_per_symbol(Modulation m) {
  switch (m) {
    case Modulation::BPSK: return 1;
    case Modulation::QPSK: return 2;
    case Modulation::PSK8: return 3;
    case Modulation::PAM4: return 2;
    case Modulation::QAM16: return 4;
    case Modulation::QAM64: return 6;
    case Modulation::CPFSK: return 1;
    case Modulation::GFSK: return 1;
  }
  return 1;
}

bool is_linear(Modulation m) {
  return m != Modulation::CPFSK && m != Modulation::GFSK;
}

const std::vector<std::complex<double>>& constellation(Modulation m) {
  static const std::vector<std::complex<double>> bpsk = {{1.0, 0.0}, {-1.0, 0.0}};
  static const std::vector<std::complex<double>> qpsk = [] {
    // One bit per axis on the diagonal constellation; quadrant neighbors
    // differ in exactly one bit.
    const double s = 1.0 / std::sqrt(2.0);
    std::vector<std::complex<double>> pts(4);
    for (int g = 0; g < 4; ++g) {
      pts[g] = {(g & 2) ? -s : s, (g & 1) ? -s : s};
    }
    return pts;
  }();
  static const std::vector<std::complex<double>> psk8 = build_psk(8);
  static const std::vector<std::complex<double>> pam4 = build_pam4();
  static const std::vector<std::complex<double>> qam16 = build_qam(2);
  static const std::vector<std::complex<double>> qam64 = build_qam(3);
  switch (m) {
    case Modulation::BPSK: return bpsk;
    case Modulation::QPSK: return qpsk;
    case Modulation::PSK8: return psk8;
    case Modulation::PAM4: return pam4;
    case Modulation::QAM16: return qam16;
    case Modulation::QAM64: return qam64;
    default: throw ConfigError(std::string("no constellation for ") + modulation_name(m));
  }
}

std::vector<std::complex<double>> map_symbols(const std::vector<uint8_t>& bits, Modulation m) {
  const int bps = bits_per_symbol(m);
  if (bits.size() % static_cast<size_t>(bps) != 0) {
    throw LengthError("bit count " + std::to_string(bits.size()) +
                      " not divisible by bits/symbol " + std::to_string(bps));
  }
  const size_t nsym = bits.size() / static_cast<size_t>(bps);
  std::vector<std::complex<double>> out(nsym);
  if (!is_linear(m)) {
    for (size_t i = 0; i < nsym; ++i) out[i] = {bits[i] ? -1.0 : 1.0, 0.0};
    return out;
  }
  const auto& pts = constellation(m);
  for (size_t i = 0; i < nsym; ++i) {
    int idx = 0;
    for (int b = 0; b < bps; ++b) idx = (idx << 1) | (bits[i * bps + b] ? 1 : 0);
    out[i] = pts[static_cast<size_t>(idx)];
  }
  return out;
}

std::vector<uint8_t> random_bits(size_t count, Rng& rng) {
  std::vector<uint8_t> bits(count);
  for (auto& b : bits) b = rng.bit() ? 1 : 0;
  return bits;
}

}  // namespace fv::signal
