#pragma once

#include <map>
#include <string>
#include <vector>

#include "fv/data/replay_queue.hpp"
#include "fv/data/scenario.hpp"
#include "fv/fl/aggregate.hpp"
#include "fv/fl/train.hpp"

namespace fv::fl {

enum class Algorithm : uint8_t {
  FEDVACCINE = 0,
  FEDVACCINE_CHAIN = 1,
  FEDAVG = 2,
  FEDSGD = 3,
  FEDPROX = 4,
  GL = 5,
  CL = 6,
  DISTL = 7,
};

const char* algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

struct ClientState {
  int id = 0;
  nn::ModelParams model;       // persistent only for the no-communication mode
  data::ReplayQueue queue;
  data::Dataset current_data;  // this round's training set
  size_t delta = 0;

  ClientState(int id_, size_t queue_capacity, int classes)
      : id(id_), queue(queue_capacity, classes) {}
};

struct GlobalState {
  nn::ModelParams global_model;
  int round = 0;
  size_t cumulative_trained_samples = 0;  // counting across rounds (pool-based modes)
};

struct RoundMetrics {
  int round = 0;
  std::string algorithm;
  double accuracy = 0.0;
  double loss = 0.0;
  std::map<int, double> per_snr_accuracy;
  std::vector<size_t> client_deltas;
  std::vector<double> client_accuracy;  // per-client evaluation (no-communication mode)
  int skipped_clients = 0;
  int skipped_clusters = 0;
  size_t server_trained_samples = 0;  // pool-based modes only
  double wall_seconds = 0.0;
};

struct FlOptions {
  uint64_t seed = 1;
  Algorithm algo = Algorithm::FEDVACCINE;
  int clients = 10;
  int global_epochs = 30;
  int local_epochs = 10;
  int batch = 64;
  double lr = 0.001;
  nn::OptimizerKind optimizer = nn::OptimizerKind::Adam;
  double prox_mu = 0.01;
  int theta_db = -12;
  size_t queue_capacity = 1500;
  int clusters = 2;
  data::ScenarioSpec scenario;
  int threads = 1;
  int eval_batch = 256;
};

// Runs the full multi-round protocol for one algorithm and returns one
// metrics record per global epoch. Per-client data draws are keyed only by
// (seed, round, client), so different algorithms at the same seed consume
// byte-identical datasets.
std::vector<RoundMetrics> run_federated(const FlOptions& opt, const data::Dataset& train_pool,
                                        const data::Dataset& test_pool,
                                        const std::vector<nn::LayerSpec>& stack,
                                        const nn::FeatShape& input,
                                        nn::ModelParams* final_model = nullptr);

}  // namespace fv::fl
