#include "fv/exp/metrics.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fv/errors.hpp"

namespace fv::exp {
namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string csv_header() {
  std::string h = "run_id,algorithm,scenario,round,theta,clusters,queue,accuracy,loss";
  for (int snr = -20; snr <= 18; snr += 2) h += ",snr_" + std::to_string(snr);
  return h + "\n";
}

std::string csv_line(const MetricRow& row) {
  std::string line = row.run_id + "," + row.algorithm + "," + row.scenario + "," +
                     std::to_string(row.round) + "," + std::to_string(row.theta) + "," +
                     row.clusters + "," + std::to_string(row.queue) + "," + fmt(row.accuracy) +
                     "," + fmt(row.loss);
  for (int snr = -20; snr <= 18; snr += 2) {
    line += ",";
    auto it = row.per_snr.find(snr);
    if (it != row.per_snr.end()) line += fmt(it->second);
  }
  return line + "\n";
}

MetricRow row_from_round(const fl::RoundMetrics& rm, const RunConfig& cfg,
                         const std::string& run_id) {
  MetricRow row;
  row.run_id = run_id;
  row.algorithm = rm.algorithm;
  row.scenario = data::scenario_name(cfg.scenario);
  row.round = rm.round;
  row.theta = cfg.theta_db;
  row.clusters = cfg.algo == fl::Algorithm::FEDVACCINE_CHAIN ? "none"
                                                             : std::to_string(cfg.clusters);
  row.queue = static_cast<long long>(cfg.queue_capacity);
  row.accuracy = rm.accuracy;
  row.loss = rm.loss;
  row.per_snr = rm.per_snr_accuracy;
  return row;
}

RunWriter::RunWriter(const std::string& out_base, const RunConfig& cfg) {
  dir_ = (fs::path(out_base) / cfg.hash()).string();
  resolved_ = cfg.resolved_text();
}

RunWriter::~RunWriter() {
  // A failed run leaves no partial directory behind; completed outputs from
  // earlier runs are untouched.
  std::error_code ec;
  fs::remove_all(dir_ + ".partial", ec);
}

void RunWriter::add_rows(const std::vector<MetricRow>& rows) {
  rows_.insert(rows_.end(), rows.begin(), rows.end());
}

void RunWriter::commit() {
  const fs::path tmp(dir_ + ".partial");
  fs::create_directories(tmp);
  {
    std::ofstream os(tmp / "config.resolved", std::ios::binary);
    if (!os) throw IoError("cannot write config.resolved under " + tmp.string());
    os << resolved_;
  }
  {
    std::ofstream os(tmp / "metrics.csv", std::ios::binary);
    if (!os) throw IoError("cannot write metrics.csv under " + tmp.string());
    os << csv_header();
    for (const MetricRow& r : rows_) os << csv_line(r);
    if (!os) throw IoError("metrics.csv write failed under " + tmp.string());
  }
  {
    std::ofstream os(tmp / "summary.json", std::ios::binary);
    if (!os) throw IoError("cannot write summary.json under " + tmp.string());
    os << summary_;
  }
  std::error_code ec;
  fs::remove_all(dir_, ec);
  fs::rename(tmp, dir_);
  committed_ = true;
}

}  // namespace fv::exp
