// Command-line front end; all functionality flows through the C API.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fedvaccine.h"

namespace {

struct ConfigHandle {
  fv_config* cfg = nullptr;
  ~ConfigHandle() {
    if (cfg) fv_config_free(cfg);
  }
};

int fail(fv_status status, const std::string& context) {
  std::fprintf(stderr, "error: %s: %s: %s\n", context.c_str(), fv_status_name(status),
               fv_last_error());
  return 1;
}

int load_config(const std::string& path, const std::vector<std::string>& sets,
                ConfigHandle& handle, const std::string& context) {
  fv_status st = path.empty() ? fv_config_create(&handle.cfg)
                              : fv_config_load(path.c_str(), &handle.cfg);
  if (st != FV_OK) return fail(st, context + ": config");
  for (const std::string& kv : sets) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: %s: --set expects key=value, got '%s'\n", context.c_str(),
                   kv.c_str());
      return 1;
    }
    st = fv_config_set(handle.cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (st != FV_OK) return fail(st, context + ": --set " + kv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated modulation-classification simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::string out_base = "out";

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Synthesize a frame dataset file");
  std::string gen_schemes, gen_out = "dataset.amcd";
  int gen_snr_min = -20, gen_snr_max = 18, gen_frames = 60;
  long long gen_seed = -1;
  gen->add_option("--schemes", gen_schemes, "Comma list (bpsk,qpsk,8psk,pam4,qam16,qam64,cpfsk,gfsk)");
  gen->add_option("--snr-min", gen_snr_min, "Lowest SNR in dB (even, >= -20)");
  gen->add_option("--snr-max", gen_snr_max, "Highest SNR in dB (even, <= 18)");
  gen->add_option("--frames-per-cell", gen_frames, "Frames per (scheme, SNR) cell");
  gen->add_option("--seed", gen_seed, "Master seed (FV_SEED also honored)");
  gen->add_option("--out", gen_out, "Output file");

  // sweep-theta
  auto* sweep = app.add_subcommand("sweep-theta", "Threshold sweep with equalized train sets");
  int sweep_repeats = 0;
  sweep->add_option("--config", config_path, "Config file");
  sweep->add_option("--repeats", sweep_repeats, "Repetitions per threshold");
  sweep->add_option("--set", sets, "Override key=value (repeatable)");
  sweep->add_option("--out-dir", out_base, "Output base directory");

  // run-fl
  auto* run = app.add_subcommand("run-fl", "One federated (or baseline) training run");
  std::string run_algo, run_scenario;
  run->add_option("--config", config_path, "Config file");
  run->add_option("--algo", run_algo,
                  "fedavg|fedsgd|fedprox|fedvaccine|chain|gl|cl|distl");
  run->add_option("--scenario", run_scenario, "iid|class-imb|vol-imb|feat-var");
  run->add_option("--set", sets, "Override key=value (repeatable)");
  run->add_option("--out-dir", out_base, "Output base directory");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Component ablation table");
  std::string ablate_kind;
  ablate->add_option("--kind", ablate_kind, "cluster|queue|snr-range")->required();
  ablate->add_option("--config", config_path, "Config file");
  ablate->add_option("--set", sets, "Override key=value (repeatable)");
  ablate->add_option("--out-dir", out_base, "Output base directory");

  // pca
  auto* pca = app.add_subcommand("pca", "Project a dataset onto its principal axes");
  std::string pca_in;
  int pca_k = 3;
  pca->add_option("--in", pca_in, "Dataset file")->required();
  pca->add_option("--k", pca_k, "Component count");
  pca->add_option("--config", config_path, "Config file");
  pca->add_option("--set", sets, "Override key=value (repeatable)");
  pca->add_option("--out-dir", out_base, "Output base directory");

  // verify
  auto* verify = app.add_subcommand("verify", "Run the oracle self-check suite");

  CLI11_PARSE(app, argc, argv);

  char dir[4096] = {0};

  if (gen->parsed()) {
    ConfigHandle h;
    std::vector<std::string> gen_sets;
    if (!gen_schemes.empty()) gen_sets.push_back("schemes=" + gen_schemes);
    gen_sets.push_back("snr_min=" + std::to_string(gen_snr_min));
    gen_sets.push_back("snr_max=" + std::to_string(gen_snr_max));
    gen_sets.push_back("train_frames_per_cell=" + std::to_string(gen_frames));
    if (gen_seed >= 0) gen_sets.push_back("seed=" + std::to_string(gen_seed));
    if (int rc = load_config("", gen_sets, h, "gen-data")) return rc;
    fv_status st = fv_generate_dataset(h.cfg, gen_out.c_str());
    if (st != FV_OK) return fail(st, "gen-data");
    std::printf("wrote %s\n", gen_out.c_str());
    return 0;
  }

  if (sweep->parsed()) {
    ConfigHandle h;
    if (sweep_repeats > 0) sets.push_back("repeats=" + std::to_string(sweep_repeats));
    if (int rc = load_config(config_path, sets, h, "sweep-theta")) return rc;
    fv_status st = fv_run_theta_sweep(h.cfg, out_base.c_str(), dir, sizeof(dir));
    if (st != FV_OK) return fail(st, "sweep-theta");
    std::printf("wrote %s\n", dir);
    return 0;
  }

  if (run->parsed()) {
    ConfigHandle h;
    if (!run_algo.empty()) sets.push_back("algo=" + run_algo);
    if (!run_scenario.empty()) sets.push_back("scenario=" + run_scenario);
    if (int rc = load_config(config_path, sets, h, "run-fl")) return rc;
    fv_status st = fv_run_fl(h.cfg, out_base.c_str(), dir, sizeof(dir));
    if (st != FV_OK) return fail(st, "run-fl");
    std::printf("wrote %s\n", dir);
    return 0;
  }

  if (ablate->parsed()) {
    ConfigHandle h;
    if (int rc = load_config(config_path, sets, h, "ablate")) return rc;
    fv_status st = fv_run_ablation(h.cfg, ablate_kind.c_str(), out_base.c_str(), dir, sizeof(dir));
    if (st != FV_OK) return fail(st, "ablate");
    std::printf("wrote %s\n", dir);
    return 0;
  }

  if (pca->parsed()) {
    ConfigHandle h;
    if (int rc = load_config(config_path, sets, h, "pca")) return rc;
    fv_status st = fv_run_pca(h.cfg, pca_in.c_str(), pca_k, out_base.c_str(), dir, sizeof(dir));
    if (st != FV_OK) return fail(st, "pca");
    std::printf("wrote %s\n", dir);
    return 0;
  }

  if (verify->parsed()) {
    fv_status st = fv_verify(/*verbose=*/1);
    if (st != FV_OK) return fail(st, "verify");
    std::printf("all checks passed\n");
    return 0;
  }

  return 1;
}
