#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace fv {

// Deterministic stream derivation: every consumer of randomness gets its own
// generator keyed by (master seed, purpose tag, indices...). Results are then
// independent of call order, thread scheduling, and how many values other
// consumers drew. All transforms below are written out explicitly so streams
// are reproducible across standard libraries.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t hash_tag(std::string_view tag) {
  uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(uint64_t state) : gen_(splitmix64(state)) {}

  uint64_t u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Modulo bias is negligible for simulation n.
  uint64_t below(uint64_t n) { return n ? u64() % n : 0; }

  int range(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(below(static_cast<uint64_t>(hi - lo + 1)));
  }

  bool bit() { return (u64() & 1u) != 0; }

  // Box-Muller; one draw per call keeps the stream layout simple.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // n distinct indices from [0, pool), order randomized (partial Fisher-Yates).
  std::vector<size_t> sample_without_replacement(size_t pool, size_t n);

 private:
  std::mt19937_64 gen_;
};

inline std::vector<size_t> Rng::sample_without_replacement(size_t pool, size_t n) {
  std::vector<size_t> idx(pool);
  for (size_t i = 0; i < pool; ++i) idx[i] = i;
  std::vector<size_t> out;
  out.reserve(n);
  for (size_t i = 0; i < n && i < pool; ++i) {
    size_t j = i + static_cast<size_t>(below(pool - i));
    std::swap(idx[i], idx[j]);
    out.push_back(idx[i]);
  }
  return out;
}

class StreamKey {
 public:
  explicit StreamKey(uint64_t master) : state_(splitmix64(master ^ 0x5bf03635d0c12a4dULL)) {}

  StreamKey& tag(std::string_view t) {
    state_ = splitmix64(state_ ^ hash_tag(t));
    return *this;
  }

  StreamKey& idx(uint64_t i) {
    state_ = splitmix64(state_ ^ (i * 0x9e3779b97f4a7c15ULL + 0x165667b19e3779f9ULL));
    return *this;
  }

  Rng rng() const { return Rng(state_); }
  uint64_t value() const { return state_; }

 private:
  uint64_t state_;
};

inline Rng derive_rng(uint64_t master, std::string_view tag) {
  return StreamKey(master).tag(tag).rng();
}

inline Rng derive_rng(uint64_t master, std::string_view tag, uint64_t a) {
  return StreamKey(master).tag(tag).idx(a).rng();
}

inline Rng derive_rng(uint64_t master, std::string_view tag, uint64_t a, uint64_t b) {
  return StreamKey(master).tag(tag).idx(a).idx(b).rng();
}

inline Rng derive_rng(uint64_t master, std::string_view tag, uint64_t a, uint64_t b, uint64_t c) {
  return StreamKey(master).tag(tag).idx(a).idx(b).idx(c).rng();
}

}  // namespace fv
