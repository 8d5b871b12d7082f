#pragma once

#include <vector>

namespace fv::data {

// Both divergences are in nats. kl_divergence requires q[i] > 0 wherever
// p[i] > 0 and throws DivergenceUndefinedError otherwise; terms with
// p[i] == 0 contribute zero.
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);

// Symmetric, bounded by ln 2, zero iff p == q.
double js_divergence(const std::vector<double>& p, const std::vector<double>& q);

std::vector<double> uniform_distribution(int classes);

// L-infinity gap to the uniform distribution (the queue uniformity
// diagnostic; compared against a tolerance, never used for control flow).
double uniformity_gap(const std::vector<double>& p);

}  // namespace fv::data
