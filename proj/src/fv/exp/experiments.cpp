#include "fv/exp/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "fv/errors.hpp"
#include "fv/nn/optim.hpp"
#include "fv/util/parallel.hpp"

namespace fv::exp {
namespace {

int resolve_threads(const RunConfig& cfg) {
  return cfg.threads > 0 ? cfg.threads : util::default_threads();
}

std::string run_id_of(const RunConfig& cfg) {
  return cfg.hash() + "-" + std::to_string(cfg.seed);
}

data::Dataset subsample(const data::Dataset& ds, size_t n, Rng& rng) {
  data::Dataset out;
  out.meta = ds.meta;
  for (size_t i : rng.sample_without_replacement(ds.size(), n)) {
    out.frames.push_back(ds.frames[i]);
  }
  return out;
}

struct CentralizedOutcome {
  double max_train_accuracy = 0.0;
  double max_test_accuracy = 0.0;
  std::vector<std::pair<int, nn::EvalResult>> test_curve;  // (epoch, eval)
};

// Plain centralized training with periodic evaluation; the optimizer state
// survives across evaluation points.
CentralizedOutcome train_centralized(const data::Dataset& train, const data::Dataset& test,
                                     const RunConfig& cfg, uint64_t init_key, uint64_t train_key) {
  const auto stack = nn::classifier_stack(cfg.class_count(), cfg.frame_len);
  const auto input = nn::input_shape(cfg.frame_len);
  nn::ModelParams params = nn::init_model(stack, input, init_key);
  nn::OptimizerState state = cfg.optimizer == "sgd" ? nn::OptimizerState::sgd(cfg.lr)
                                                    : nn::OptimizerState::adam(cfg.lr);
  Rng rng(train_key);
  std::vector<size_t> order(train.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto train_ptrs = train.frame_ptrs();
  const auto test_ptrs = test.frame_ptrs();

  CentralizedOutcome out;
  auto evaluate_now = [&](int epoch) {
    nn::EvalResult tr = nn::evaluate(params, stack, input, train_ptrs);
    nn::EvalResult te = nn::evaluate(params, stack, input, test_ptrs);
    out.max_train_accuracy = std::max(out.max_train_accuracy, tr.accuracy);
    out.max_test_accuracy = std::max(out.max_test_accuracy, te.accuracy);
    out.test_curve.emplace_back(epoch, std::move(te));
  };

  for (int epoch = 1; epoch <= cfg.sweep_epochs; ++epoch) {
    rng.shuffle(order);
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch)) {
      const size_t end = std::min(order.size(), start + static_cast<size_t>(cfg.batch));
      std::vector<const data::Frame*> chunk;
      std::vector<int> labels;
      for (size_t i = start; i < end; ++i) {
        chunk.push_back(&train.frames[order[i]]);
        labels.push_back(train.frames[order[i]].label);
      }
      nn::Tensor batch = nn::frames_to_batch(chunk, cfg.frame_len);
      nn::BackwardResult bw = nn::backward(params, stack, input, batch, labels, rng);
      nn::optimizer_step(params, bw.grads, state);
    }
    if (epoch % cfg.eval_every == 0 || epoch == cfg.sweep_epochs) evaluate_now(epoch);
  }
  return out;
}

std::vector<MetricRow> rows_from_run(const std::vector<fl::RoundMetrics>& rounds,
                                     const RunConfig& cfg, const std::string& run_id) {
  std::vector<MetricRow> rows;
  rows.reserve(rounds.size());
  for (const auto& rm : rounds) rows.push_back(row_from_round(rm, cfg, run_id));
  return rows;
}

}  // namespace

std::vector<int> theta_candidates() { return signal::snr_grid(-20, 18); }

data::Dataset make_pool(const RunConfig& cfg, const std::string& tag, int frames_per_cell) {
  data::Dataset pool;
  pool.meta.seed = cfg.seed;
  pool.meta.schemes = cfg.schemes;
  pool.meta.snrs = cfg.grid();
  signal::SynthesisParams sp;
  sp.frame_len = cfg.frame_len;
  signal::ImpairmentSpec impair;  // defaults on

  const size_t total = cfg.schemes.size() * pool.meta.snrs.size() *
                       static_cast<size_t>(frames_per_cell);
  pool.frames.resize(total);
  struct Cell {
    size_t base;
    signal::Modulation scheme;
    uint8_t label;
    int snr;
  };
  std::vector<Cell> cells;
  size_t base = 0;
  for (size_t ci = 0; ci < cfg.schemes.size(); ++ci) {
    for (int snr : pool.meta.snrs) {
      cells.push_back({base, cfg.schemes[ci], static_cast<uint8_t>(ci), snr});
      base += static_cast<size_t>(frames_per_cell);
    }
  }
  util::parallel_for(cells.size(), resolve_threads(cfg), [&](size_t k) {
    const Cell& cell = cells[k];
    for (int i = 0; i < frames_per_cell; ++i) {
      Rng rng = StreamKey(cfg.seed)
                    .tag(tag)
                    .idx(static_cast<uint64_t>(cell.scheme))
                    .idx(static_cast<uint64_t>(cell.snr + 100))
                    .idx(static_cast<uint64_t>(i))
                    .rng();
      data::Frame f = signal::synthesize_frame(cell.scheme, cell.snr, impair, rng, sp);
      f.label = cell.label;  // label is the position in the configured scheme list
      pool.frames[cell.base + static_cast<size_t>(i)] = std::move(f);
    }
  });
  return pool;
}

SweepResult run_theta_sweep(const RunConfig& cfg) {
  const data::Dataset train_pool = make_pool(cfg, "train-pool", cfg.train_frames_per_cell);
  const data::Dataset test_pool = make_pool(cfg, "test-pool", cfg.test_frames_per_cell);
  const auto thetas = theta_candidates();
  const size_t eq_size = data::filter_by_snr(train_pool, 18).size();
  if (eq_size == 0) throw StratificationError("training pool has no frames at 18 dB");

  SweepResult result;
  result.equalized_train_size = eq_size;
  const int K = cfg.repeats;
  result.cells.resize(thetas.size() * static_cast<size_t>(K));
  std::vector<std::vector<MetricRow>> cell_rows(result.cells.size());
  const std::string run_id = run_id_of(cfg);

  util::parallel_for(result.cells.size(), resolve_threads(cfg), [&](size_t idx) {
    const size_t ti = idx / static_cast<size_t>(K);
    const int rep = static_cast<int>(idx % static_cast<size_t>(K));
    const int theta = thetas[ti];
    data::Dataset filtered = data::filter_by_snr(train_pool, theta);
    Rng sub_rng = derive_rng(cfg.seed, "sweep-sub", ti, static_cast<uint64_t>(rep));
    data::Dataset train = subsample(filtered, eq_size, sub_rng);
    CentralizedOutcome out = train_centralized(
        train, test_pool, cfg, StreamKey(cfg.seed).tag("sweep-init").idx(ti).idx(rep).value(),
        StreamKey(cfg.seed).tag("sweep-train").idx(ti).idx(rep).value());
    SweepCell& cell = result.cells[idx];
    cell.theta = theta;
    cell.repeat = rep;
    cell.max_train_accuracy = out.max_train_accuracy;
    cell.max_test_accuracy = out.max_test_accuracy;
    for (const auto& [epoch, ev] : out.test_curve) {
      MetricRow row;
      row.run_id = run_id + "-r" + std::to_string(rep);
      row.algorithm = "centralized";
      row.scenario = "sweep";
      row.round = epoch;
      row.theta = theta;
      row.clusters = std::to_string(cfg.clusters);
      row.queue = static_cast<long long>(cfg.queue_capacity);
      row.accuracy = ev.accuracy;
      row.loss = ev.loss;
      row.per_snr = ev.per_snr_accuracy;
      cell_rows[idx].push_back(std::move(row));
    }
  });

  for (auto& rows : cell_rows) {
    for (auto& r : rows) result.rows.push_back(std::move(r));
  }

  result.mean_per_theta.resize(thetas.size(), 0.0);
  result.std_per_theta.resize(thetas.size(), 0.0);
  for (size_t ti = 0; ti < thetas.size(); ++ti) {
    double mean = 0.0;
    for (int r = 0; r < K; ++r) {
      mean += result.cells[ti * static_cast<size_t>(K) + static_cast<size_t>(r)].max_test_accuracy;
    }
    mean /= K;
    double var = 0.0;
    for (int r = 0; r < K; ++r) {
      const double d =
          result.cells[ti * static_cast<size_t>(K) + static_cast<size_t>(r)].max_test_accuracy -
          mean;
      var += d * d;
    }
    result.mean_per_theta[ti] = mean;
    result.std_per_theta[ti] = std::sqrt(var / K);
  }
  size_t best = 0;
  for (size_t ti = 1; ti < thetas.size(); ++ti) {
    if (result.mean_per_theta[ti] > result.mean_per_theta[best]) best = ti;
  }
  result.best_theta = thetas[best];
  return result;
}

IidComparisonResult run_iid_comparison(const RunConfig& cfg) {
  const data::Dataset train_pool = make_pool(cfg, "train-pool", cfg.train_frames_per_cell);
  const data::Dataset test_pool = make_pool(cfg, "test-pool", cfg.test_frames_per_cell);
  const auto stack = nn::classifier_stack(cfg.class_count(), cfg.frame_len);
  const auto input = nn::input_shape(cfg.frame_len);
  const std::string run_id = run_id_of(cfg);

  IidComparisonResult result;
  for (int theta : theta_candidates()) {
    data::Dataset restricted = data::filter_by_snr(train_pool, theta);
    for (fl::Algorithm algo : {fl::Algorithm::FEDAVG, fl::Algorithm::FEDVACCINE}) {
      RunConfig local = cfg;
      local.algo = algo;
      local.scenario = data::ScenarioKind::IID;
      local.theta_db = cfg.snr_lo;  // the pool restriction is the only filter
      fl::FlOptions opt = local.fl_options();
      auto rounds = fl::run_federated(opt, restricted, test_pool, stack, input);
      IidComparisonRow row;
      row.theta = theta;
      row.algorithm = fl::algorithm_name(algo);
      for (const auto& rm : rounds) {
        if (rm.accuracy > row.max_test_accuracy) {
          row.max_test_accuracy = rm.accuracy;
          row.best_epoch = rm.round;
        }
      }
      result.rows.push_back(row);
      for (const auto& rm : rounds) {
        MetricRow mr = row_from_round(rm, local, run_id);
        mr.theta = theta;
        result.metric_rows.push_back(std::move(mr));
      }
    }
  }
  return result;
}

BenchmarkResult run_noniid_benchmark(const RunConfig& cfg,
                                     const std::vector<fl::Algorithm>& algorithms,
                                     const std::vector<data::ScenarioKind>& scenarios) {
  const data::Dataset train_pool = make_pool(cfg, "train-pool", cfg.train_frames_per_cell);
  const data::Dataset test_pool = make_pool(cfg, "test-pool", cfg.test_frames_per_cell);
  const auto stack = nn::classifier_stack(cfg.class_count(), cfg.frame_len);
  const auto input = nn::input_shape(cfg.frame_len);
  const std::string run_id = run_id_of(cfg);

  BenchmarkResult result;
  for (data::ScenarioKind scenario : scenarios) {
    for (fl::Algorithm algo : algorithms) {
      RunConfig local = cfg;
      local.algo = algo;
      local.scenario = scenario;
      // Larger replay budget under distribution shift.
      local.queue_capacity = cfg.queue_capacity + 500;
      fl::FlOptions opt = local.fl_options();
      auto rounds = fl::run_federated(opt, train_pool, test_pool, stack, input);
      for (const auto& rm : rounds) {
        result.metric_rows.push_back(row_from_round(rm, local, run_id));
      }
    }
  }
  return result;
}

AblationKind ablation_from_name(const std::string& name) {
  if (name == "cluster") return AblationKind::CLUSTER;
  if (name == "queue") return AblationKind::QUEUE;
  if (name == "snr-range") return AblationKind::SNR_RANGE;
  throw ConfigError("unknown ablation kind: " + name);
}

const char* ablation_name(AblationKind k) {
  switch (k) {
    case AblationKind::CLUSTER: return "cluster";
    case AblationKind::QUEUE: return "queue";
    case AblationKind::SNR_RANGE: return "snr-range";
  }
  return "?";
}

AblationResult run_ablation(AblationKind kind, const RunConfig& cfg) {
  const data::Dataset train_pool = make_pool(cfg, "train-pool", cfg.train_frames_per_cell);
  const data::Dataset test_pool = make_pool(cfg, "test-pool", cfg.test_frames_per_cell);
  const auto stack = nn::classifier_stack(cfg.class_count(), cfg.frame_len);
  const auto input = nn::input_shape(cfg.frame_len);
  const std::string run_id = run_id_of(cfg);

  AblationResult result;
  auto record = [&](const RunConfig& local, const std::string& setting,
                    const std::string& memory) {
    fl::FlOptions opt = local.fl_options();
    const data::Dataset* pool = &train_pool;
    data::Dataset band_pool;
    if (kind == AblationKind::SNR_RANGE) {
      // setting is "lo~hi"
      const size_t tilde = setting.find('~');
      band_pool = data::filter_by_snr_band(train_pool, std::stoi(setting.substr(0, tilde)),
                                           std::stoi(setting.substr(tilde + 1)));
      pool = &band_pool;
    }
    auto rounds = fl::run_federated(opt, *pool, test_pool, stack, input);
    AblationRow row;
    row.setting = setting;
    row.memory = memory;
    row.min_loss = rounds.empty() ? 0.0 : rounds.front().loss;
    for (const auto& rm : rounds) {
      row.max_accuracy = std::max(row.max_accuracy, rm.accuracy);
      row.min_loss = std::min(row.min_loss, rm.loss);
    }
    result.rows.push_back(row);
    for (const auto& rm : rounds) {
      MetricRow mr = row_from_round(rm, local, run_id + "-" + setting);
      result.metric_rows.push_back(std::move(mr));
    }
  };

  switch (kind) {
    case AblationKind::CLUSTER: {
      for (int c : {1, 2, 3, 4, 5, 10}) {
        RunConfig local = cfg;
        local.algo = fl::Algorithm::FEDVACCINE;
        local.scenario = data::ScenarioKind::IID;
        local.clusters = std::min(c, cfg.clients);
        record(local, std::to_string(c), "");
      }
      RunConfig chain = cfg;
      chain.algo = fl::Algorithm::FEDVACCINE_CHAIN;
      chain.scenario = data::ScenarioKind::IID;
      record(chain, "none", "");
      break;
    }
    case AblationKind::QUEUE: {
      for (int k : {0, 1, 2, 3, 4, 5, 10}) {
        RunConfig local = cfg;
        local.algo = fl::Algorithm::FEDVACCINE;
        local.scenario = data::ScenarioKind::IID;
        local.queue_capacity = static_cast<size_t>(k) * 1000;
        // 4-byte floats at shape (2, frame_len): 1000 samples per 1000 KB.
        const std::string memory = k == 0 ? "d" : "d+" + std::to_string(k * 1000) + "KB";
        record(local, k == 0 ? "none" : std::to_string(k), memory);
      }
      break;
    }
    case AblationKind::SNR_RANGE: {
      for (const auto& band : {std::pair{-20, -12}, std::pair{-10, -2}, std::pair{0, 8},
                               std::pair{10, 18}}) {
        RunConfig local = cfg;
        local.algo = fl::Algorithm::FEDVACCINE;
        local.scenario = data::ScenarioKind::IID;
        local.theta_db = cfg.snr_lo;  // band restriction is the only filter
        record(local, std::to_string(band.first) + "~" + std::to_string(band.second), "");
      }
      break;
    }
  }
  return result;
}

FlRunResult run_fl(const RunConfig& cfg) {
  const data::Dataset train_pool = make_pool(cfg, "train-pool", cfg.train_frames_per_cell);
  const data::Dataset test_pool = make_pool(cfg, "test-pool", cfg.test_frames_per_cell);
  const auto stack = nn::classifier_stack(cfg.class_count(), cfg.frame_len);
  const auto input = nn::input_shape(cfg.frame_len);
  FlRunResult result;
  fl::FlOptions opt = cfg.fl_options();
  result.rounds = fl::run_federated(opt, train_pool, test_pool, stack, input, &result.final_model);
  result.metric_rows = rows_from_run(result.rounds, cfg, run_id_of(cfg));
  return result;
}

}  // namespace fv::exp
