#pragma once

#include <vector>

#include "fv/nn/model.hpp"
#include "fv/rng.hpp"

namespace fv::fl {

struct ClusterPlan {
  std::vector<std::vector<int>> clusters;  // ordered; disjoint cover of clients

  int cluster_count() const { return static_cast<int>(clusters.size()); }
};

// Random permutation split into `count` near-equal groups (sizes differ by at
// most one). Throws ConfigError when count is outside [1, clients].
ClusterPlan partition_clusters(int clients, int count, Rng& rng);

struct WeightedParams {
  const nn::ModelParams* params = nullptr;
  double weight = 0.0;  // sample count delta
};

// Convex combination with weights normalized to the weight sum.
nn::ModelParams aggregate_fedavg(const std::vector<WeightedParams>& members);

// Per layer: mean over members of (1 - rho_i) * prev + rho_i * w_i with
// rho_i = delta_i / sum(delta). A zero delta sum returns prev unchanged.
nn::ModelParams aggregate_fedvaccine(const nn::ModelParams& prev,
                                     const std::vector<WeightedParams>& members);

}  // namespace fv::fl
