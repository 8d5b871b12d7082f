#include "fv/data/divergence.hpp"

#include <cmath>
#include <string>

#include "fv/errors.hpp"

namespace fv::data {

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw DimensionError("distribution lengths differ");
  double acc = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) {
      throw DivergenceUndefinedError("KL undefined: q[" + std::to_string(i) +
                                     "] = 0 where p > 0");
    }
    acc += p[i] * std::log(p[i] / q[i]);
  }
  return acc < 0.0 ? 0.0 : acc;  // clamp rounding noise at the p == q fixpoint
}

double js_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw DimensionError("distribution lengths differ");
  std::vector<double> m(p.size());
  for (size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
  return 0.5 * kl_divergence(p, m) + 0.5 * kl_divergence(q, m);
}

std::vector<double> uniform_distribution(int classes) {
  return std::vector<double>(static_cast<size_t>(classes), 1.0 / classes);
}

double uniformity_gap(const std::vector<double>& p) {
  const double u = 1.0 / static_cast<double>(p.size());
  double gap = 0.0;
  for (double v : p) gap = std::max(gap, std::abs(v - u));
  return gap;
}

}  // namespace fv::data
