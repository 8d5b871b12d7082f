#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fv/data/scenario.hpp"
#include "fv/fl/rounds.hpp"
#include "fv/signal/modulation.hpp"

namespace fv::exp {

// Full experiment configuration. File defaults follow the reference protocol
// (10 clients, 10 local epochs, 100 global epochs, batch 400, lr 0.001,
// queue 1500, 2 clusters, theta -12); desk-scale runs override via file or
// command line.
struct RunConfig {
  uint64_t seed = 1;
  int clients = 10;
  int global_epochs = 100;
  int local_epochs = 10;
  int batch = 400;
  double lr = 0.001;
  int theta_db = -12;
  size_t queue_capacity = 1500;
  int clusters = 2;
  int repeats = 4;  // per-theta repetitions in the sweep
  fl::Algorithm algo = fl::Algorithm::FEDVACCINE;
  data::ScenarioKind scenario = data::ScenarioKind::IID;
  std::vector<signal::Modulation> schemes;  // defaults to all eight
  int frame_len = 128;
  int snr_lo = -20;
  int snr_hi = 18;
  int train_frames_per_cell = 60;
  int test_frames_per_cell = 20;
  int samples_per_client = 1000;
  int feat_var_min = 400;
  int feat_var_max = 600;
  double prox_mu = 0.01;
  int sweep_epochs = 40;  // centralized training budget per sweep cell
  int eval_every = 2;     // sweep evaluation cadence (epochs)
  int threads = 0;        // 0 = hardware concurrency
  std::string optimizer = "adam";

  int class_count() const { return static_cast<int>(schemes.size()); }
  std::vector<int> grid() const;
  fl::FlOptions fl_options() const;

  // Canonical "key=value" lines in fixed key order; what gets hashed and
  // written as config.resolved.
  std::string resolved_text() const;
  std::string hash() const;  // 16 hex digits over resolved_text
};

RunConfig default_config();

// key=value lines, '#' comments, blank lines allowed. Unknown keys, type
// mismatches and constraint violations raise ConfigError naming the key and
// line. FV_SEED in the environment overrides the file's seed; explicit
// overrides win over both.
RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides);
RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides);

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value,
                    int line_no = 0);

uint64_t fnv1a64(const std::string& text);

}  // namespace fv::exp
