#include "fv/data/scenario.hpp"

#include <map>

#include "fv/errors.hpp"

namespace fv::data {
namespace {

Dataset take(const Dataset& pool, const std::vector<size_t>& indices) {
  Dataset out;
  out.meta = pool.meta;
  out.frames.reserve(indices.size());
  for (size_t i : indices) out.frames.push_back(pool.frames[i]);
  return out;
}

}  // namespace

const char* scenario_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::IID: return "iid";
    case ScenarioKind::CLASS_IMBALANCE: return "class-imb";
    case ScenarioKind::VOLUME_IMBALANCE: return "vol-imb";
    case ScenarioKind::FEATURE_VARIANCE: return "feat-var";
  }
  return "?";
}

ScenarioKind scenario_from_name(const std::string& name) {
  for (int i = 0; i < 4; ++i) {
    auto k = static_cast<ScenarioKind>(i);
    if (name == scenario_name(k)) return k;
  }
  throw ConfigError("unknown scenario: " + name);
}

Dataset sample_scenario(const ScenarioSpec& spec, const Dataset& pool, int client, int round,
                        Rng& rng) {
  (void)client;
  (void)round;  // identity lives in the rng stream key
  if (pool.empty()) throw StratificationError("scenario pool is empty");
  const int classes = pool.class_count();
  const size_t n = static_cast<size_t>(spec.base_samples);

  switch (spec.kind) {
    case ScenarioKind::IID: {
      if (n > pool.size()) {
        throw StratificationError("pool smaller than requested IID draw");
      }
      return take(pool, rng.sample_without_replacement(pool.size(), n));
    }

    case ScenarioKind::CLASS_IMBALANCE: {
      std::vector<double> weights(static_cast<size_t>(classes));
      double wsum = 0.0;
      for (double& w : weights) {
        w = rng.uniform();
        wsum += w;
      }
      if (wsum <= 0.0) wsum = 1.0;
      // Per-class frame index lists.
      std::vector<std::vector<size_t>> strata(static_cast<size_t>(classes));
      for (size_t i = 0; i < pool.size(); ++i) strata[pool.frames[i].label].push_back(i);
      // Class counts from the normalized weights, then per-class subsets.
      std::vector<size_t> counts(static_cast<size_t>(classes), 0);
      for (size_t s = 0; s < n; ++s) {
        double u = rng.uniform() * wsum;
        size_t c = 0;
        for (; c + 1 < weights.size(); ++c) {
          if (u < weights[c]) break;
          u -= weights[c];
        }
        counts[c] += 1;
      }
      std::vector<size_t> chosen;
      chosen.reserve(n);
      for (size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) continue;
        if (strata[c].empty()) {
          throw StratificationError("pool has no frames of class " + std::to_string(c));
        }
        if (counts[c] > strata[c].size()) {
          throw StratificationError("class " + std::to_string(c) + " stratum smaller than draw");
        }
        for (size_t k : rng.sample_without_replacement(strata[c].size(), counts[c])) {
          chosen.push_back(strata[c][k]);
        }
      }
      return take(pool, chosen);
    }

    case ScenarioKind::VOLUME_IMBALANCE: {
      const double p = rng.uniform();
      const size_t m = static_cast<size_t>(p * static_cast<double>(n));
      if (m > pool.size()) {
        throw StratificationError("pool smaller than requested volume draw");
      }
      return take(pool, rng.sample_without_replacement(pool.size(), m));
    }

    case ScenarioKind::FEATURE_VARIANCE: {
      std::map<int, std::vector<size_t>> by_snr;
      for (size_t i = 0; i < pool.size(); ++i) by_snr[pool.frames[i].snr_db].push_back(i);
      std::vector<int> snrs;
      for (const auto& [snr, _] : by_snr) snrs.push_back(snr);
      const int snr = snrs[rng.below(snrs.size())];
      const size_t m = static_cast<size_t>(rng.range(spec.feat_var_min, spec.feat_var_max));
      const auto& stratum = by_snr[snr];
      if (m > stratum.size()) {
        throw StratificationError("SNR " + std::to_string(snr) + " stratum holds " +
                                  std::to_string(stratum.size()) + " frames, need " +
                                  std::to_string(m));
      }
      std::vector<size_t> chosen;
      chosen.reserve(m);
      for (size_t k : rng.sample_without_replacement(stratum.size(), m)) {
        chosen.push_back(stratum[k]);
      }
      return take(pool, chosen);
    }
  }
  throw ConfigError("unknown scenario kind");
}

}  // namespace fv::data
