#pragma once

#include <string>
#include <vector>

#include "fv/exp/config.hpp"
#include "fv/exp/metrics.hpp"

namespace fv::exp {

// The 20 candidate thresholds: -20, -18, ..., 18.
std::vector<int> theta_candidates();

// Stratified frame pools; every (scheme, snr) cell holds frames_per_cell
// frames. Per-frame streams are keyed (seed, pool tag, scheme, snr, index),
// so any frame is reproducible in isolation.
data::Dataset make_pool(const RunConfig& cfg, const std::string& tag, int frames_per_cell);

struct SweepCell {
  int theta = 0;
  int repeat = 0;
  double max_train_accuracy = 0.0;
  double max_test_accuracy = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;             // theta-major, repeat-minor
  std::vector<double> mean_per_theta;       // of max test accuracy
  std::vector<double> std_per_theta;        // over exactly `repeats` repeats
  int best_theta = 0;                       // argmax of mean_per_theta
  size_t equalized_train_size = 0;
  std::vector<MetricRow> rows;
};

// Trains a fresh centralized model per (theta, repeat) on an
// equal-cardinality subsample of the threshold-filtered pool and evaluates
// on the full-SNR test split.
SweepResult run_theta_sweep(const RunConfig& cfg);

struct IidComparisonRow {
  int theta = 0;
  std::string algorithm;
  double max_test_accuracy = 0.0;
  int best_epoch = 0;
};

struct IidComparisonResult {
  std::vector<IidComparisonRow> rows;  // 20 per algorithm
  std::vector<MetricRow> metric_rows;
};

// Per threshold: restrict the training pool to snr >= theta and run both the
// plain-averaging baseline and the cluster-blend protocol at the same seed.
IidComparisonResult run_iid_comparison(const RunConfig& cfg);

struct BenchmarkResult {
  // One metrics series per (algorithm, scenario), all fed byte-identical
  // per-round client datasets.
  std::vector<MetricRow> metric_rows;
};

BenchmarkResult run_noniid_benchmark(const RunConfig& cfg,
                                     const std::vector<fl::Algorithm>& algorithms,
                                     const std::vector<data::ScenarioKind>& scenarios);

enum class AblationKind { CLUSTER, QUEUE, SNR_RANGE };

AblationKind ablation_from_name(const std::string& name);
const char* ablation_name(AblationKind k);

struct AblationRow {
  std::string setting;
  std::string memory;  // queue ablation only
  double max_accuracy = 0.0;
  double min_loss = 0.0;
};

struct AblationResult {
  std::vector<AblationRow> rows;
  std::vector<MetricRow> metric_rows;
};

// CLUSTER: cluster counts 1,2,3,4,5,10 plus the chained mode. QUEUE:
// capacities {0,1,2,3,4,5,10} x 1000 samples with their memory cost. SNR_RANGE:
// training restricted to one of four disjoint bands, tested on the full grid.
AblationResult run_ablation(AblationKind kind, const RunConfig& cfg);

// Single federated run (one algorithm, one scenario) -> per-round rows plus
// the final global model.
struct FlRunResult {
  std::vector<fl::RoundMetrics> rounds;
  std::vector<MetricRow> metric_rows;
  nn::ModelParams final_model;
};

FlRunResult run_fl(const RunConfig& cfg);

}  // namespace fv::exp
