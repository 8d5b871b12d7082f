#include "fedvaccine.h"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fv/data/dataset.hpp"
#include "fv/errors.hpp"
#include "fv/exp/experiments.hpp"
#include "fv/exp/pca.hpp"
#include "fv/exp/verify.hpp"
#include "fv/nn/checkpoint.hpp"
#include "json.hpp"

namespace {

thread_local std::string g_last_error;

struct NullArg {};

fv_status to_status(const std::exception& e) {
  g_last_error = e.what();
  if (dynamic_cast<const fv::ConfigError*>(&e)) return FV_ERR_CONFIG;
  if (dynamic_cast<const fv::FormatError*>(&e)) return FV_ERR_FORMAT;
  if (dynamic_cast<const fv::IoError*>(&e)) return FV_ERR_IO;
  return FV_ERR_INTERNAL;
}

template <typename F>
fv_status guarded(F&& fn) {
  try {
    fn();
    g_last_error.clear();
    return FV_OK;
  } catch (const NullArg&) {
    g_last_error = "null argument";
    return FV_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    return to_status(e);
  } catch (...) {
    g_last_error = "unknown failure";
    return FV_ERR_INTERNAL;
  }
}

void require(bool ok) {
  if (!ok) throw NullArg{};
}

void copy_out(const std::string& value, char* buf, size_t cap) {
  if (!buf || cap == 0) return;
  const size_t n = std::min(value.size(), cap - 1);
  std::memcpy(buf, value.data(), n);
  buf[n] = '\0';
}

using nlohmann::json;

std::string summary_common(const fv::exp::RunConfig& cfg) {
  json j;
  j["config_hash"] = cfg.hash();
  j["seed"] = cfg.seed;
  std::istringstream is(cfg.resolved_text());
  json cfg_echo = json::object();
  std::string line;
  while (std::getline(is, line)) {
    const size_t eq = line.find('=');
    if (eq != std::string::npos) cfg_echo[line.substr(0, eq)] = line.substr(eq + 1);
  }
  j["config"] = cfg_echo;
  return j.dump();
}

}  // namespace

struct fv_config {
  fv::exp::RunConfig cfg;
};

struct fv_dataset {
  fv::data::Dataset ds;
};

extern "C" {

const char* fv_status_name(fv_status status) {
  switch (status) {
    case FV_OK: return "ok";
    case FV_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case FV_ERR_CONFIG: return "config-error";
    case FV_ERR_IO: return "io-error";
    case FV_ERR_FORMAT: return "format-error";
    case FV_ERR_VERIFY_FAILED: return "verify-failed";
    case FV_ERR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

const char* fv_last_error(void) { return g_last_error.c_str(); }

const char* fv_version_string(void) { return "0.1.0"; }

fv_status fv_config_create(fv_config** out) {
  return guarded([&] {
    require(out != nullptr);
    *out = new fv_config{fv::exp::parse_config_text("", {})};
  });
}

fv_status fv_config_load(const char* path, fv_config** out) {
  return guarded([&] {
    require(out != nullptr);
    *out = new fv_config{fv::exp::parse_config(path ? path : "", {})};
  });
}

fv_status fv_config_set(fv_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg && key && value);
    fv::exp::apply_override(cfg->cfg, key, value);
  });
}

fv_status fv_config_get(const fv_config* cfg, const char* key, char* buf, size_t cap) {
  return guarded([&] {
    require(cfg && key && buf);
    std::istringstream is(cfg->cfg.resolved_text());
    std::string line;
    const std::string want = std::string(key) + "=";
    while (std::getline(is, line)) {
      if (line.rfind(want, 0) == 0) {
        copy_out(line.substr(want.size()), buf, cap);
        return;
      }
    }
    throw fv::ConfigError("unknown config key '" + std::string(key) + "'");
  });
}

fv_status fv_config_hash(const fv_config* cfg, char* buf, size_t cap) {
  return guarded([&] {
    require(cfg && buf);
    copy_out(cfg->cfg.hash(), buf, cap);
  });
}

void fv_config_free(fv_config* cfg) { delete cfg; }

fv_status fv_generate_dataset(const fv_config* cfg, const char* path) {
  return guarded([&] {
    require(cfg && path);
    fv::data::Dataset pool =
        fv::exp::make_pool(cfg->cfg, "train-pool", cfg->cfg.train_frames_per_cell);
    fv::data::write_dataset(pool, path);
  });
}

fv_status fv_dataset_open(const char* path, fv_dataset** out) {
  return guarded([&] {
    require(path && out);
    *out = new fv_dataset{fv::data::read_dataset(path)};
  });
}

fv_status fv_dataset_info(const fv_dataset* ds, uint64_t* frame_count, uint32_t* frame_len,
                          uint8_t* class_count) {
  return guarded([&] {
    require(ds != nullptr);
    if (frame_count) *frame_count = ds->ds.size();
    if (frame_len) {
      *frame_len = ds->ds.empty() ? 0 : static_cast<uint32_t>(ds->ds.frames.front().length());
    }
    if (class_count) *class_count = static_cast<uint8_t>(ds->ds.class_count());
  });
}

void fv_dataset_free(fv_dataset* ds) { delete ds; }

fv_status fv_run_theta_sweep(const fv_config* cfg, const char* out_base, char* out_dir,
                             size_t out_dir_cap) {
  return guarded([&] {
    require(cfg && out_base);
    const auto& rc = cfg->cfg;
    fv::exp::SweepResult sweep = fv::exp::run_theta_sweep(rc);
    fv::exp::RunWriter writer(out_base, rc);
    writer.add_rows(sweep.rows);

    json j = json::parse(summary_common(rc));
    j["experiment"] = "sweep-theta";
    j["best_theta"] = sweep.best_theta;
    j["equalized_train_size"] = sweep.equalized_train_size;
    const auto thetas = fv::exp::theta_candidates();
    json table = json::array();
    for (size_t ti = 0; ti < thetas.size(); ++ti) {
      json row;
      row["theta"] = thetas[ti];
      row["mean_max_test_accuracy"] = sweep.mean_per_theta[ti];
      row["std_max_test_accuracy"] = sweep.std_per_theta[ti];
      json reps = json::array();
      for (const auto& cell : sweep.cells) {
        if (cell.theta != thetas[ti]) continue;
        reps.push_back({{"repeat", cell.repeat},
                        {"max_train_accuracy", cell.max_train_accuracy},
                        {"max_test_accuracy", cell.max_test_accuracy}});
      }
      row["repeats"] = reps;
      table.push_back(row);
    }
    j["table"] = table;
    writer.set_summary(j.dump(2) + "\n");
    writer.commit();
    copy_out(writer.dir(), out_dir, out_dir_cap);
  });
}

fv_status fv_run_fl(const fv_config* cfg, const char* out_base, char* out_dir,
                    size_t out_dir_cap) {
  return guarded([&] {
    require(cfg && out_base);
    const auto& rc = cfg->cfg;
    fv::exp::FlRunResult run = fv::exp::run_fl(rc);
    fv::exp::RunWriter writer(out_base, rc);
    writer.add_rows(run.metric_rows);

    json j = json::parse(summary_common(rc));
    j["experiment"] = "run-fl";
    double best_acc = 0.0;
    int best_round = 0;
    for (const auto& rm : run.rounds) {
      if (rm.accuracy > best_acc) {
        best_acc = rm.accuracy;
        best_round = rm.round;
      }
    }
    j["max_test_accuracy"] = best_acc;
    j["best_round"] = best_round;
    j["final_accuracy"] = run.rounds.empty() ? 0.0 : run.rounds.back().accuracy;
    writer.set_summary(j.dump(2) + "\n");
    writer.commit();
    fv::nn::save_checkpoint(run.final_model,
                            (std::filesystem::path(writer.dir()) / "model.fvnn").string());
    copy_out(writer.dir(), out_dir, out_dir_cap);
  });
}

fv_status fv_run_ablation(const fv_config* cfg, const char* kind, const char* out_base,
                          char* out_dir, size_t out_dir_cap) {
  return guarded([&] {
    require(cfg && kind && out_base);
    const auto& rc = cfg->cfg;
    const fv::exp::AblationKind k = fv::exp::ablation_from_name(kind);
    fv::exp::AblationResult res = fv::exp::run_ablation(k, rc);
    fv::exp::RunWriter writer(out_base, rc);
    writer.add_rows(res.metric_rows);

    json j = json::parse(summary_common(rc));
    j["experiment"] = std::string("ablate-") + fv::exp::ablation_name(k);
    json table = json::array();
    for (const auto& row : res.rows) {
      json r;
      r["setting"] = row.setting;
      if (!row.memory.empty()) r["memory"] = row.memory;
      r["max_accuracy"] = row.max_accuracy;
      r["min_loss"] = row.min_loss;
      table.push_back(r);
    }
    j["table"] = table;
    writer.set_summary(j.dump(2) + "\n");
    writer.commit();
    copy_out(writer.dir(), out_dir, out_dir_cap);
  });
}

fv_status fv_run_pca(const fv_config* cfg, const char* dataset_path, int k, const char* out_base,
                     char* out_dir, size_t out_dir_cap) {
  return guarded([&] {
    require(cfg && dataset_path && out_base);
    if (k <= 0) throw fv::ConfigError("component count must be positive");
    const auto& rc = cfg->cfg;
    fv::data::Dataset ds = fv::data::read_dataset(dataset_path);
    fv::exp::PcaResult pca = fv::exp::pca_project(ds, k);

    fv::exp::RunWriter writer(out_base, rc);
    json j = json::parse(summary_common(rc));
    j["experiment"] = "pca";
    j["components_requested"] = k;
    j["components_found"] = pca.components.size();
    j["rank_deficient"] = pca.rank_deficient;
    j["explained_variance"] = pca.explained_variance;
    writer.set_summary(j.dump(2) + "\n");
    writer.commit();

    std::ofstream os(std::filesystem::path(writer.dir()) / "projections.csv", std::ios::binary);
    if (!os) throw fv::IoError("cannot write projections.csv");
    os << "label,snr_db";
    for (size_t c = 0; c < pca.components.size(); ++c) os << ",pc" << (c + 1);
    os << "\n";
    char buf[32];
    for (size_t i = 0; i < pca.projections.size(); ++i) {
      os << static_cast<int>(ds.frames[i].label) << "," << static_cast<int>(ds.frames[i].snr_db);
      for (double v : pca.projections[i]) {
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        os << "," << buf;
      }
      os << "\n";
    }
    copy_out(writer.dir(), out_dir, out_dir_cap);
  });
}

fv_status fv_verify(int verbose) {
  try {
    const auto results = fv::exp::run_verification();
    bool ok = true;
    for (const auto& r : results) {
      if (verbose) {
        std::printf("[%s] %s%s%s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.empty() ? "" : ": ", r.detail.c_str());
      }
      ok = ok && r.passed;
    }
    if (!ok) {
      g_last_error = "verification failed";
      return FV_ERR_VERIFY_FAILED;
    }
    g_last_error.clear();
    return FV_OK;
  } catch (const std::exception& e) {
    return to_status(e);
  }
}

}  // extern "C"
