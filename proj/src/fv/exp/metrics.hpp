#pragma once

#include <map>
#include <string>
#include <vector>

#include "fv/exp/config.hpp"
#include "fv/fl/rounds.hpp"

namespace fv::exp {

// One metrics.csv line. The column schema is identical for every subcommand:
// run_id, algorithm, scenario, round, theta, clusters, queue, accuracy,
// loss, then snr_-20 .. snr_18. Missing per-SNR cells stay empty.
struct MetricRow {
  std::string run_id;
  std::string algorithm;
  std::string scenario;
  int round = 0;
  int theta = 0;
  std::string clusters;  // "none" for the chained mode
  long long queue = 0;
  double accuracy = 0.0;
  double loss = 0.0;
  std::map<int, double> per_snr;
};

std::string csv_header();
std::string csv_line(const MetricRow& row);

MetricRow row_from_round(const fl::RoundMetrics& rm, const RunConfig& cfg,
                         const std::string& run_id);

// out_base/<config-hash>/ with config.resolved, metrics.csv and summary.json.
// Nothing is left behind if a write fails midway.
class RunWriter {
 public:
  RunWriter(const std::string& out_base, const RunConfig& cfg);
  ~RunWriter();

  const std::string& dir() const { return dir_; }

  void add_row(const MetricRow& row) { rows_.push_back(row); }
  void add_rows(const std::vector<MetricRow>& rows);
  void set_summary(const std::string& json_text) { summary_ = json_text; }

  void commit();  // writes all three files; call once

 private:
  std::string dir_;
  std::string resolved_;
  std::vector<MetricRow> rows_;
  std::string summary_ = "{}";
  bool committed_ = false;
};

}  // namespace fv::exp
