// Exercises the shared-library surface: opaque handles, status codes, file
// outputs. Plain asserts keep this binary independent of the C++ internals.
#include <cassert>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "fedvaccine.h"

namespace fs = std::filesystem;

#define REQUIRE_MSG(cond, msg)                                             \
  do {                                                                     \
    if (!(cond)) {                                                         \
      std::fprintf(stderr, "[FAIL] %s:%d %s (%s)\n", __FILE__, __LINE__,   \
                   msg, fv_last_error());                                  \
      return 1;                                                            \
    }                                                                      \
  } while (0)

int main() {
  // Null arguments are rejected, not crashed on.
  REQUIRE_MSG(fv_config_create(nullptr) == FV_ERR_INVALID_ARGUMENT, "null out");
  REQUIRE_MSG(std::strlen(fv_version_string()) > 0, "version string");

  fv_config* cfg = nullptr;
  REQUIRE_MSG(fv_config_create(&cfg) == FV_OK, "config create");

  // Reference defaults visible through the accessor.
  char buf[256];
  REQUIRE_MSG(fv_config_get(cfg, "theta", buf, sizeof(buf)) == FV_OK, "get theta");
  REQUIRE_MSG(std::string(buf) == "-12", "default theta");
  REQUIRE_MSG(fv_config_get(cfg, "clients", buf, sizeof(buf)) == FV_OK, "get clients");
  REQUIRE_MSG(std::string(buf) == "10", "default clients");

  // Setters validate.
  REQUIRE_MSG(fv_config_set(cfg, "clusters", "3") == FV_OK, "set clusters");
  REQUIRE_MSG(fv_config_set(cfg, "theta", "banana") == FV_ERR_CONFIG, "bad theta");
  REQUIRE_MSG(fv_config_set(cfg, "not_a_key", "1") == FV_ERR_CONFIG, "unknown key");
  REQUIRE_MSG(std::strlen(fv_last_error()) > 0, "error message populated");

  char hash1[32], hash2[32];
  REQUIRE_MSG(fv_config_hash(cfg, hash1, sizeof(hash1)) == FV_OK, "hash");
  REQUIRE_MSG(std::strlen(hash1) == 16, "hash length");
  REQUIRE_MSG(fv_config_set(cfg, "theta", "-8") == FV_OK, "set theta");
  REQUIRE_MSG(fv_config_hash(cfg, hash2, sizeof(hash2)) == FV_OK, "hash2");
  REQUIRE_MSG(std::string(hash1) != std::string(hash2), "hash tracks config");

  // Small synthetic dataset through the opaque handle.
  REQUIRE_MSG(fv_config_set(cfg, "schemes", "bpsk,qpsk") == FV_OK, "set schemes");
  REQUIRE_MSG(fv_config_set(cfg, "frame_len", "32") == FV_OK, "set frame_len");
  REQUIRE_MSG(fv_config_set(cfg, "train_frames_per_cell", "2") == FV_OK, "set frames");
  REQUIRE_MSG(fv_config_set(cfg, "snr_min", "-4") == FV_OK, "set snr_min");
  REQUIRE_MSG(fv_config_set(cfg, "snr_max", "4") == FV_OK, "set snr_max");
  const char* ds_path = "capi_test.amcd";
  REQUIRE_MSG(fv_generate_dataset(cfg, ds_path) == FV_OK, "generate dataset");

  fv_dataset* ds = nullptr;
  REQUIRE_MSG(fv_dataset_open(ds_path, &ds) == FV_OK, "dataset open");
  uint64_t frames = 0;
  uint32_t frame_len = 0;
  uint8_t classes = 0;
  REQUIRE_MSG(fv_dataset_info(ds, &frames, &frame_len, &classes) == FV_OK, "dataset info");
  REQUIRE_MSG(frames == 2ull * 5 * 2, "frame count");  // 2 schemes x 5 snrs x 2
  REQUIRE_MSG(frame_len == 32, "frame length");
  REQUIRE_MSG(classes == 2, "class count");
  fv_dataset_free(ds);

  REQUIRE_MSG(fv_dataset_open("missing.amcd", &ds) == FV_ERR_IO, "missing file");

  // Tiny federated run through the public runner; rerun is byte-identical.
  REQUIRE_MSG(fv_config_set(cfg, "clients", "2") == FV_OK, "set clients");
  REQUIRE_MSG(fv_config_set(cfg, "global_epochs", "2") == FV_OK, "set rounds");
  REQUIRE_MSG(fv_config_set(cfg, "local_epochs", "1") == FV_OK, "set local epochs");
  REQUIRE_MSG(fv_config_set(cfg, "samples_per_client", "10") == FV_OK, "set n");
  REQUIRE_MSG(fv_config_set(cfg, "batch", "8") == FV_OK, "set batch");
  REQUIRE_MSG(fv_config_set(cfg, "queue", "16") == FV_OK, "set queue");
  REQUIRE_MSG(fv_config_set(cfg, "clusters", "2") == FV_OK, "set clusters");
  REQUIRE_MSG(fv_config_set(cfg, "theta", "-4") == FV_OK, "set theta");
  REQUIRE_MSG(fv_config_set(cfg, "test_frames_per_cell", "1") == FV_OK, "set test frames");

  const char* out_base = "capi_out";
  fs::remove_all(out_base);
  char dir[1024];
  REQUIRE_MSG(fv_run_fl(cfg, out_base, dir, sizeof(dir)) == FV_OK, "run fl");
  REQUIRE_MSG(fs::exists(fs::path(dir) / "metrics.csv"), "metrics.csv");
  REQUIRE_MSG(fs::exists(fs::path(dir) / "summary.json"), "summary.json");
  REQUIRE_MSG(fs::exists(fs::path(dir) / "config.resolved"), "config.resolved");
  REQUIRE_MSG(fs::exists(fs::path(dir) / "model.fvnn"), "model checkpoint");

  auto read_file = [](const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  };
  const std::string csv1 = read_file(fs::path(dir) / "metrics.csv");
  REQUIRE_MSG(fv_run_fl(cfg, out_base, dir, sizeof(dir)) == FV_OK, "rerun fl");
  const std::string csv2 = read_file(fs::path(dir) / "metrics.csv");
  REQUIRE_MSG(csv1 == csv2, "reruns are byte-identical");

  // Principal-axis projection of the stored dataset.
  REQUIRE_MSG(fv_run_pca(cfg, ds_path, 3, out_base, dir, sizeof(dir)) == FV_OK, "pca");
  REQUIRE_MSG(fs::exists(fs::path(dir) / "projections.csv"), "projections.csv");

  fv_config_free(cfg);
  fs::remove_all(out_base);
  std::remove(ds_path);

  std::printf("capi surface ok\n");
  return 0;
}
