#include "fv/exp/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fv/errors.hpp"
#include "fv/nn/optim.hpp"

namespace fv::exp {
namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

long long parse_int(const std::string& key, const std::string& value, int line_no) {
  try {
    size_t used = 0;
    long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' expects an integer, got '" + value + "'" +
                      (line_no ? " (line " + std::to_string(line_no) + ")" : ""));
  }
}

double parse_real(const std::string& key, const std::string& value, int line_no) {
  try {
    size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' expects a number, got '" + value + "'" +
                      (line_no ? " (line " + std::to_string(line_no) + ")" : ""));
  }
}

void check_positive(const std::string& key, long long v, int line_no) {
  if (v <= 0) {
    throw ConfigError("key '" + key + "' must be positive" +
                      (line_no ? " (line " + std::to_string(line_no) + ")" : ""));
  }
}

void check_grid_value(const std::string& key, long long v, int line_no) {
  if (v < -20 || v > 18 || v % 2 != 0) {
    throw ConfigError("key '" + key + "' must be an even dB value in [-20, 18]" +
                      (line_no ? " (line " + std::to_string(line_no) + ")" : ""));
  }
}

std::vector<signal::Modulation> parse_schemes(const std::string& value, int line_no) {
  std::vector<signal::Modulation> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(signal::modulation_from_name(item));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) +
                        (line_no ? " (line " + std::to_string(line_no) + ")" : ""));
    }
  }
  if (out.empty()) throw ConfigError("key 'schemes' lists no schemes");
  return out;
}

}  // namespace

uint64_t fnv1a64(const std::string& text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<int> RunConfig::grid() const { return signal::snr_grid(snr_lo, snr_hi); }

fl::FlOptions RunConfig::fl_options() const {
  fl::FlOptions o;
  o.seed = seed;
  o.algo = algo;
  o.clients = clients;
  o.global_epochs = global_epochs;
  o.local_epochs = local_epochs;
  o.batch = batch;
  o.lr = lr;
  o.optimizer = optimizer == "sgd" ? nn::OptimizerKind::SGD : nn::OptimizerKind::Adam;
  o.prox_mu = prox_mu;
  o.theta_db = theta_db;
  o.queue_capacity = queue_capacity;
  o.clusters = clusters;
  o.scenario.kind = scenario;
  o.scenario.base_samples = samples_per_client;
  o.scenario.feat_var_min = feat_var_min;
  o.scenario.feat_var_max = feat_var_max;
  o.threads = threads;
  return o;
}

std::string RunConfig::resolved_text() const {
  std::ostringstream os;
  os << "seed=" << seed << "\n";
  os << "clients=" << clients << "\n";
  os << "global_epochs=" << global_epochs << "\n";
  os << "local_epochs=" << local_epochs << "\n";
  os << "batch=" << batch << "\n";
  os << "lr=" << lr << "\n";
  os << "theta=" << theta_db << "\n";
  os << "queue=" << queue_capacity << "\n";
  os << "clusters=" << clusters << "\n";
  os << "repeats=" << repeats << "\n";
  os << "algo=" << fl::algorithm_name(algo) << "\n";
  os << "scenario=" << data::scenario_name(scenario) << "\n";
  os << "schemes=";
  for (size_t i = 0; i < schemes.size(); ++i) {
    if (i) os << ",";
    os << signal::modulation_name(schemes[i]);
  }
  os << "\n";
  os << "frame_len=" << frame_len << "\n";
  os << "snr_min=" << snr_lo << "\n";
  os << "snr_max=" << snr_hi << "\n";
  os << "train_frames_per_cell=" << train_frames_per_cell << "\n";
  os << "test_frames_per_cell=" << test_frames_per_cell << "\n";
  os << "samples_per_client=" << samples_per_client << "\n";
  os << "feat_var_min=" << feat_var_min << "\n";
  os << "feat_var_max=" << feat_var_max << "\n";
  os << "prox_mu=" << prox_mu << "\n";
  os << "sweep_epochs=" << sweep_epochs << "\n";
  os << "eval_every=" << eval_every << "\n";
  os << "threads=" << threads << "\n";
  os << "optimizer=" << optimizer << "\n";
  return os.str();
}

std::string RunConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(resolved_text())));
  return std::string(buf);
}

RunConfig default_config() {
  RunConfig cfg;
  for (int i = 0; i < signal::kModulationCount; ++i) {
    cfg.schemes.push_back(static_cast<signal::Modulation>(i));
  }
  return cfg;
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value,
                    int line_no) {
  if (key == "seed") {
    cfg.seed = static_cast<uint64_t>(parse_int(key, value, line_no));
  } else if (key == "clients") {
    long long v = parse_int(key, value, line_no);
    check_positive(key, v, line_no);
    cfg.clients = static_cast<int>(v);
  } else if (key == "global_epochs") {
    long long v = parse_int(key, value, line_no);
    check_positive(key, v, line_no);
    cfg.global_epochs = static_cast<int>(v);
  } else if (key == "local_epochs") {
    long long v = parse_int(key, value, line_no);
    if (v < 0) throw ConfigError("key 'local_epochs' must be >= 0");
    cfg.local_epochs = static_cast<int>(v);
  } else if (key == "batch") {
    long long v = parse_int(key, value, line_no);
    check_positive(key, v, line_no);
    cfg.batch = static_cast<int>(v);
  } else if (key == "lr") {
    double v = parse_real(key, value, line_no);
    if (v <= 0.0) throw ConfigError("key 'lr' must be positive");
    cfg.lr = v;
  } else if (key == "theta") {
    long long v = parse_int(key, value, line_no);
    check_grid_value(key, v, line_no);
    cfg.theta_db = static_cast<int>(v);
  } else if (key == "queue") {
    long long v = parse_int(key, value, line_no);
    if (v < 0) throw ConfigError("key 'queue' must be >= 0");
    cfg.queue_capacity = static_cast<size_t>(v);
  } else if (key == "clusters") {
    long long v = parse_int(key, value, line_no);
    check_positive(key, v, line_no);
    cfg.clusters = static_cast<int>(v);
  } else if (key == "repeats") {
    long long v = parse_int(key, value, line_no);
    check_positive(key, v, line_no);
    cfg.repeats = static_cast<int>(v);
  } else if (key == "algo") {
    cfg.algo = fl::algorithm_from_name(value);
  } else if (key == "scenario") {
    cfg.scenario = data::scenario_from_name(value);
  } else if (key == "schemes") {
    cfg.schemes = parse_schemes(value, line_no);
  } else if (key == "frame_len") {
    long long v = parse_int(key, value, line_no);
    check_positive(key, v, line_no);
    cfg.frame_len = static_cast<int>(v);
  } else if (key == "snr_min") {
    long long v = parse_int(key, value, line_no);
    check_grid_value(key, v, line_no);
    cfg.snr_lo = static_cast<int>(v);
  } else if (key == "snr_max") {
    long long v = parse_int(key, value, line_no);
    check_grid_value(key, v, line_no);
    cfg.snr_hi = static_cast<int>(v);
  } else if (key == "train_frames_per_cell") {
    long long v = parse_int(key, value, line_no);
    check_positive(key, v, line_no);
    cfg.train_frames_per_cell = static_cast<int>(v);
  } else if (key == "test_frames_per_cell") {
    long long v = parse_int(key, value, line_no);
    check_positive(key, v, line_no);
    cfg.test_frames_per_cell = static_cast<int>(v);
  } else if (key == "samples_per_client") {
    long long v = parse_int(key, value, line_no);
    check_positive(key, v, line_no);
    cfg.samples_per_client = static_cast<int>(v);
  } else if (key == "feat_var_min") {
    long long v = parse_int(key, value, line_no);
    check_positive(key, v, line_no);
    cfg.feat_var_min = static_cast<int>(v);
  } else if (key == "feat_var_max") {
    long long v = parse_int(key, value, line_no);
    check_positive(key, v, line_no);
    cfg.feat_var_max = static_cast<int>(v);
  } else if (key == "prox_mu") {
    double v = parse_real(key, value, line_no);
    if (v < 0.0) throw ConfigError("key 'prox_mu' must be >= 0");
    cfg.prox_mu = v;
  } else if (key == "sweep_epochs") {
    long long v = parse_int(key, value, line_no);
    check_positive(key, v, line_no);
    cfg.sweep_epochs = static_cast<int>(v);
  } else if (key == "eval_every") {
    long long v = parse_int(key, value, line_no);
    check_positive(key, v, line_no);
    cfg.eval_every = static_cast<int>(v);
  } else if (key == "threads") {
    long long v = parse_int(key, value, line_no);
    if (v < 0) throw ConfigError("key 'threads' must be >= 0");
    cfg.threads = static_cast<int>(v);
  } else if (key == "optimizer") {
    if (value != "adam" && value != "sgd") {
      throw ConfigError("key 'optimizer' must be adam or sgd" +
                        (line_no ? " (line " + std::to_string(line_no) + ")" : ""));
    }
    cfg.optimizer = value;
  } else {
    throw ConfigError("unknown config key '" + key + "'" +
                      (line_no ? " (line " + std::to_string(line_no) + ")" : ""));
  }
}

RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides) {
  RunConfig cfg = default_config();
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const size_t hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key=value (line " + std::to_string(line_no) + ")");
    }
    apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no);
  }

  if (const char* env_seed = std::getenv("FV_SEED")) {
    apply_override(cfg, "seed", env_seed);
  }
  for (const std::string& ov : overrides) {
    const size_t eq = ov.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + ov + "' is not key=value");
    apply_override(cfg, trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
  }

  if (cfg.snr_lo > cfg.snr_hi) throw ConfigError("snr_min exceeds snr_max");
  if (cfg.feat_var_min > cfg.feat_var_max) throw ConfigError("feat_var_min exceeds feat_var_max");
  if (cfg.frame_len % 8 != 0) throw ConfigError("frame_len must be a multiple of 8");
  return cfg;
}

RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::string text;
  if (!path.empty()) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config file " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    text = buf.str();
  }
  return parse_config_text(text, overrides);
}

}  // namespace fv::exp
