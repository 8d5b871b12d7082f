// Drives the installed CLI binary end to end through std::system.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const std::string kBin = FVSIM_PATH;

int run(const std::string& args) {
  const int rc = std::system((kBin + " " + args + " > cli_stdout.txt 2> cli_stderr.txt").c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

std::string tiny_overrides() {
  return "--set schemes=bpsk,qpsk --set frame_len=16 --set train_frames_per_cell=3 "
         "--set test_frames_per_cell=1 --set clients=2 --set global_epochs=2 "
         "--set local_epochs=1 --set batch=8 --set samples_per_client=10 "
         "--set queue=16 --set snr_min=-4 --set snr_max=4 --set theta=-4 --set threads=1";
}

}  // namespace

TEST_CASE("gen-data writes a loadable dataset") {
  fs::remove("cli_ds.amcd");
  CHECK(run("gen-data --schemes bpsk,qpsk --snr-min -4 --snr-max 4 --frames-per-cell 2 "
            "--seed 3 --out cli_ds.amcd") == 0);
  REQUIRE(fs::exists("cli_ds.amcd"));
  // 19-byte header + 2 schemes x 5 snrs x 2 frames x (2 + 2*128*4) bytes
  CHECK(fs::file_size("cli_ds.amcd") == 19 + 20 * (2 + 2 * 128 * 4));
}

TEST_CASE("run-fl produces the run directory and is repeatable") {
  fs::remove_all("cli_out");
  CHECK(run("run-fl --algo fedvaccine --scenario iid " + tiny_overrides() +
            " --out-dir cli_out") == 0);
  // Find the hash directory.
  REQUIRE(fs::exists("cli_out"));
  fs::path run_dir;
  for (const auto& e : fs::directory_iterator("cli_out")) run_dir = e.path();
  REQUIRE(!run_dir.empty());
  REQUIRE(fs::exists(run_dir / "metrics.csv"));
  const std::string csv1 = slurp(run_dir / "metrics.csv");
  // Header + one row per round.
  CHECK(std::count(csv1.begin(), csv1.end(), '\n') == 3);
  CHECK(csv1.rfind("run_id,algorithm,scenario,round,theta,clusters,queue,accuracy,loss", 0) == 0);

  CHECK(run("run-fl --algo fedvaccine --scenario iid " + tiny_overrides() +
            " --out-dir cli_out") == 0);
  CHECK(slurp(run_dir / "metrics.csv") == csv1);
}

TEST_CASE("env seed changes the run directory") {
  fs::remove_all("cli_env_out");
  CHECK(run("run-fl --algo fedavg --scenario iid " + tiny_overrides() +
            " --out-dir cli_env_out") == 0);
  setenv("FV_SEED", "31337", 1);
  CHECK(run("run-fl --algo fedavg --scenario iid " + tiny_overrides() +
            " --out-dir cli_env_out") == 0);
  unsetenv("FV_SEED");
  int dirs = 0;
  for (const auto& e : fs::directory_iterator("cli_env_out")) {
    (void)e;
    ++dirs;
  }
  CHECK(dirs == 2);
}

TEST_CASE("bad arguments exit nonzero with a single-line error") {
  CHECK(run("run-fl --algo not-an-algo " + tiny_overrides()) != 0);
  const std::string err = slurp("cli_stderr.txt");
  CHECK(err.rfind("error:", 0) == 0);
  CHECK(std::count(err.begin(), err.end(), '\n') == 1);

  CHECK(run("definitely-not-a-subcommand") != 0);
  CHECK(run("run-fl --set theta=banana " + tiny_overrides()) != 0);
}

TEST_CASE("pca subcommand consumes a generated dataset") {
  CHECK(run("gen-data --schemes bpsk,qpsk --snr-min 0 --snr-max 4 --frames-per-cell 4 "
            "--seed 5 --out cli_pca.amcd") == 0);
  fs::remove_all("cli_pca_out");
  CHECK(run("pca --in cli_pca.amcd --k 3 --out-dir cli_pca_out") == 0);
  fs::path run_dir;
  for (const auto& e : fs::directory_iterator("cli_pca_out")) run_dir = e.path();
  REQUIRE(fs::exists(run_dir / "projections.csv"));
  const std::string csv = slurp(run_dir / "projections.csv");
  CHECK(csv.rfind("label,snr_db,pc1,pc2,pc3", 0) == 0);
  // Header + one row per frame.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 3 * 4);
  fs::remove("cli_pca.amcd");
  fs::remove_all("cli_pca_out");
}

TEST_CASE("cleanup") {
  fs::remove("cli_ds.amcd");
  fs::remove_all("cli_out");
  fs::remove_all("cli_env_out");
  fs::remove("cli_stdout.txt");
  fs::remove("cli_stderr.txt");
}
