#pragma once

#include <cstdint>
#include <string>

#include "fv/data/dataset.hpp"
#include "fv/rng.hpp"

namespace fv::data {

enum class ScenarioKind : uint8_t {
  IID = 0,
  CLASS_IMBALANCE = 1,
  VOLUME_IMBALANCE = 2,
  FEATURE_VARIANCE = 3,
};

const char* scenario_name(ScenarioKind k);
ScenarioKind scenario_from_name(const std::string& name);

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::IID;
  int base_samples = 1000;  // per client per round
  int feat_var_min = 400;
  int feat_var_max = 600;
};

// Draws one client's round dataset from the stratified pool. The rng stream
// must be keyed by (seed, client, round) so draws are reproducible and
// identical across algorithms.
//
//   IID              n frames uniform over the pool
//   CLASS_IMBALANCE  per-class inclusion weights ~ U[0,1], redrawn per call
//   VOLUME_IMBALANCE keep-probability p ~ U[0,1], floor(p*n) frames
//   FEATURE_VARIANCE one SNR for the whole draw, count ~ U[min, max]
//
// Throws StratificationError when the pool cannot cover a required stratum.
Dataset sample_scenario(const ScenarioSpec& spec, const Dataset& pool, int client, int round,
                        Rng& rng);

}  // namespace fv::data
