#include "fv/fl/aggregate.hpp"

#include "fv/errors.hpp"

namespace fv::fl {
namespace {

void check_members(const std::vector<WeightedParams>& members) {
  if (members.empty()) throw AggregationError("no members to aggregate");
  for (const auto& m : members) {
    if (m.weight < 0.0) throw AggregationError("negative aggregation weight");
    if (!members.front().params->same_shapes(*m.params)) {
      throw AggregationError("member parameter shapes differ");
    }
  }
}

void check_layer_match(const nn::ModelParams& a, const nn::ModelParams& b) {
  if (a.layers.size() != b.layers.size()) {
    throw AggregationError("layer counts differ");
  }
  for (size_t l = 0; l < a.layers.size(); ++l) {
    if (a.layers[l].tensors.size() != b.layers[l].tensors.size()) {
      throw AggregationError("tensor sets differ at layer " + std::to_string(l));
    }
    for (size_t t = 0; t < a.layers[l].tensors.size(); ++t) {
      if (a.layers[l].tensors[t].shape != b.layers[l].tensors[t].shape) {
        throw AggregationError("shape mismatch at layer " + std::to_string(l));
      }
    }
  }
}

}  // namespace

ClusterPlan partition_clusters(int clients, int count, Rng& rng) {
  if (count < 1 || count > clients) {
    throw ConfigError("cluster count " + std::to_string(count) + " outside [1, " +
                      std::to_string(clients) + "]");
  }
  std::vector<int> order(static_cast<size_t>(clients));
  for (int i = 0; i < clients; ++i) order[static_cast<size_t>(i)] = i;
  rng.shuffle(order);
  ClusterPlan plan;
  plan.clusters.resize(static_cast<size_t>(count));
  const int base = clients / count;
  const int extra = clients % count;  // first `extra` clusters get one more
  size_t pos = 0;
  for (int c = 0; c < count; ++c) {
    const int sz = base + (c < extra ? 1 : 0);
    plan.clusters[static_cast<size_t>(c)].assign(order.begin() + static_cast<long>(pos),
                                                 order.begin() + static_cast<long>(pos + sz));
    pos += static_cast<size_t>(sz);
  }
  return plan;
}

nn::ModelParams aggregate_fedavg(const std::vector<WeightedParams>& members) {
  check_members(members);
  double total = 0.0;
  for (const auto& m : members) total += m.weight;
  if (total <= 0.0) throw AggregationError("aggregation weights sum to zero");

  nn::ModelParams out = *members.front().params;
  out.for_each([](nn::Tensor& t) { t.fill(0.0); });
  for (const auto& m : members) {
    const double q = m.weight / total;
    for (size_t l = 0; l < out.layers.size(); ++l) {
      for (size_t t = 0; t < out.layers[l].tensors.size(); ++t) {
        double* dst = out.layers[l].tensors[t].ptr();
        const double* src = m.params->layers[l].tensors[t].ptr();
        const size_t n = out.layers[l].tensors[t].size();
        for (size_t k = 0; k < n; ++k) dst[k] += q * src[k];
      }
    }
  }
  return out;
}

nn::ModelParams aggregate_fedvaccine(const nn::ModelParams& prev,
                                     const std::vector<WeightedParams>& members) {
  check_members(members);
  check_layer_match(prev, *members.front().params);
  double total = 0.0;
  for (const auto& m : members) total += m.weight;
  if (total <= 0.0) return prev;

  const double inv_n = 1.0 / static_cast<double>(members.size());
  nn::ModelParams out = prev;
  out.for_each([](nn::Tensor& t) { t.fill(0.0); });
  for (const auto& m : members) {
    const double rho = m.weight / total;
    for (size_t l = 0; l < out.layers.size(); ++l) {
      for (size_t t = 0; t < out.layers[l].tensors.size(); ++t) {
        double* dst = out.layers[l].tensors[t].ptr();
        const double* pw = prev.layers[l].tensors[t].ptr();
        const double* mw = m.params->layers[l].tensors[t].ptr();
        const size_t n = out.layers[l].tensors[t].size();
        for (size_t k = 0; k < n; ++k) {
          dst[k] += inv_n * ((1.0 - rho) * pw[k] + rho * mw[k]);
        }
      }
    }
  }
  return out;
}

}  // namespace fv::fl
