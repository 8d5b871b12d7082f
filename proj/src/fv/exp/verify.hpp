#pragma once

#include <string>
#include <vector>

namespace fv::exp {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Self-check oracle suite behind the `verify` subcommand: analytic gradients
// against central finite differences, synthesized-frame SNR calibration,
// divergence algebra against hand-derived values, and the aggregation
// identities. Designed to finish in seconds.
std::vector<CheckResult> run_verification();

bool all_passed(const std::vector<CheckResult>& results);

// Worst relative error of analytic vs central finite-difference gradients
// (step 1e-4) per layer kind, exposed so heavier suites can sweep seeds.
struct GradientCheckCase {
  std::string name;
  double max_rel_error = 0.0;
};

std::vector<GradientCheckCase> gradient_check_layers(uint64_t seed);

// Same check through the whole classifier with the cross-entropy head.
double gradient_check_model(uint64_t seed);

}  // namespace fv::exp
