#include "adaptrack/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "adaptrack/errors.hpp"
#include "adaptrack/linalg.hpp"

namespace adaptrack {

namespace {

struct Entry {
  std::size_t line = 0;
  std::vector<double> values;
  std::vector<std::string> raw;
  bool consumed = false;
};

struct Parser {
  std::string path;
  std::map<std::string, Entry> entries;

  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(path + ": " + message); }
  [[noreturn]] void fail_at(std::size_t line, const std::string& message) const {
    throw ConfigError(path + ":" + std::to_string(line) + ": " + message);
  }
  // Semantic failure attributed to a key; carries the key's line when known.
  [[noreturn]] void fail_key(const std::string& key, const std::string& message) const {
    auto it = entries.find(key);
    if (it != entries.end()) {
      fail_at(it->second.line, message);
    }
    fail(message);
  }

  Entry& require(const std::string& key) {
    auto it = entries.find(key);
    if (it == entries.end()) {
      fail("missing key '" + key + "'");
    }
    it->second.consumed = true;
    return it->second;
  }

  Entry* find(const std::string& key) {
    auto it = entries.find(key);
    if (it == entries.end()) {
      return nullptr;
    }
    it->second.consumed = true;
    return &it->second;
  }

  double scalar(const std::string& key) {
    const Entry& e = require(key);
    if (e.values.size() != 1) {
      fail_at(e.line, "key '" + key + "' expects exactly one number");
    }
    return e.values[0];
  }

  double scalar_or(const std::string& key, double fallback) {
    Entry* e = find(key);
    if (e == nullptr) {
      return fallback;
    }
    if (e->values.size() != 1) {
      fail_at(e->line, "key '" + key + "' expects exactly one number");
    }
    return e->values[0];
  }

  long integer(const std::string& key, long fallback) {
    const double v = scalar_or(key, static_cast<double>(fallback));
    if (v != std::floor(v)) {
      fail("key '" + key + "' expects an integer");
    }
    return static_cast<long>(v);
  }

  Mat matrix(const std::string& key, int rows, int cols) {
    const Entry& e = require(key);
    if (e.values.size() != static_cast<std::size_t>(rows * cols)) {
      fail_at(e.line, "key '" + key + "' expects " + std::to_string(rows * cols) +
                          " values (row-major " + std::to_string(rows) + "x" +
                          std::to_string(cols) + ")");
    }
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        m(r, c) = e.values[static_cast<std::size_t>(r * cols + c)];
      }
    }
    return m;
  }

  Vec vector(const std::string& key, int n) {
    const Entry& e = require(key);
    if (e.values.size() != static_cast<std::size_t>(n)) {
      fail_at(e.line, "key '" + key + "' expects " + std::to_string(n) + " values");
    }
    Vec v(n);
    for (int i = 0; i < n; ++i) {
      v(i) = e.values[static_cast<std::size_t>(i)];
    }
    return v;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    Entry* e = find(key);
    if (e == nullptr) {
      return fallback;
    }
    if (e->raw.size() != 1) {
      fail_at(e->line, "key '" + key + "' expects exactly one token");
    }
    return e->raw[0];
  }
};

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

Parser read_entries(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path + ": cannot open file");
  }
  Parser p;
  p.path = path;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      p.fail_at(line_no, "expected 'key = values'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      p.fail_at(line_no, "empty key");
    }
    if (p.entries.count(key) != 0) {
      p.fail_at(line_no, "duplicate key '" + key + "'");
    }
    Entry entry;
    entry.line = line_no;
    std::istringstream tokens(line.substr(eq + 1));
    std::string token;
    while (tokens >> token) {
      entry.raw.push_back(token);
      char* end = nullptr;
      const double value = std::strtod(token.c_str(), &end);
      if (end != token.c_str() && *end == '\0') {
        entry.values.push_back(value);
      }
    }
    if (entry.values.size() != entry.raw.size()) {
      entry.values.clear();  // non-numeric entry (paths, flags handled as text)
    }
    p.entries.emplace(key, std::move(entry));
  }
  return p;
}

bool near_multiple(double value, double step) {
  const double ratio = value / step;
  return std::abs(ratio - std::llround(ratio)) < 1e-9 * std::max(1.0, std::abs(ratio));
}

}  // namespace

ExperimentConfig parse_config(const std::string& path) {
  Parser p = read_entries(path);
  ExperimentConfig cfg;

  cfg.n_x = static_cast<int>(p.integer("plant.nx", 0));
  cfg.n_u = static_cast<int>(p.integer("plant.nu", 0));
  if (cfg.n_x <= 0 || cfg.n_x > 16 || cfg.n_u <= 0 || cfg.n_u > 16) {
    p.fail("plant.nx and plant.nu must be in 1..16");
  }

  cfg.A_p = p.matrix("plant.A_p", cfg.n_x, cfg.n_x);
  cfg.B_p = p.matrix("plant.B_p", cfg.n_x, cfg.n_u);
  cfg.lambda = p.vector("plant.lambda", cfg.n_u);
  cfg.u_max = p.scalar("plant.u_max");
  cfg.x0 = p.vector("plant.x0", cfg.n_x);

  cfg.A_m = p.matrix("reference.A_m", cfg.n_x, cfg.n_x);
  cfg.B_m = p.matrix("reference.B_m", cfg.n_x, cfg.n_u);

  cfg.Q = p.matrix("weights.Q", cfg.n_x, cfg.n_x);
  cfg.R = p.matrix("weights.R", cfg.n_u, cfg.n_u);
  cfg.Q_f = p.matrix("weights.Q_f", cfg.n_x, cfg.n_x);

  cfg.exo_channels.resize(cfg.n_x);
  for (int i = 0; i < cfg.n_x; ++i) {
    const std::string key = "exo.ch" + std::to_string(i);
    const Entry& e = p.require(key);
    if (e.values.size() % 3 != 0) {
      p.fail_at(e.line, "key '" + key + "' expects (amplitude omega phase) triples");
    }
    for (std::size_t j = 0; j < e.values.size(); j += 3) {
      cfg.exo_channels[i].push_back(SinTerm{e.values[j], e.values[j + 1], e.values[j + 2]});
    }
  }

  cfg.gamma = p.scalar("tuner.gamma");
  cfg.beta = p.scalar("tuner.beta");
  cfg.Q_lyap = p.matrix("tuner.Q_lyap", cfg.n_x, cfg.n_x);
  cfg.init_scale = p.scalar_or("tuner.init_scale", 0.8);
  if (Entry* e = p.find("tuner.theta0")) {
    const int cols = cfg.n_x + 2 * cfg.n_u;
    if (e->values.size() != static_cast<std::size_t>(cfg.n_u * cols)) {
      p.fail_at(e->line, "tuner.theta0 expects " + std::to_string(cfg.n_u * cols) +
                             " values (row-major n_u x (n_x + 2 n_u))");
    }
    Mat theta0(cfg.n_u, cols);
    for (int r = 0; r < cfg.n_u; ++r) {
      for (int c = 0; c < cols; ++c) {
        theta0(r, c) = e->values[static_cast<std::size_t>(r * cols + c)];
      }
    }
    cfg.theta0 = theta0;
  }

  cfg.step_h = p.scalar("schedule.h");
  cfg.t_adap = p.scalar("schedule.t_adap");
  cfg.t_mpc = p.scalar("schedule.t_mpc");
  cfg.delta_s = p.scalar("schedule.delta_s");
  cfg.horizon = p.scalar("schedule.horizon");

  cfg.out_dir = p.text("output.dir", "out");
  cfg.prefix = p.text("output.prefix", "");
  cfg.plots = p.integer("output.plots", 0) != 0;
  cfg.seed = p.integer("seed", 0);

  for (const auto& [key, entry] : p.entries) {
    if (!entry.consumed) {
      p.fail_at(entry.line, "unknown key '" + key + "'");
    }
  }

  // Semantic validation, with the offending key and line in every message.
  if ((cfg.lambda.array() <= 0.0).any()) {
    p.fail_key("plant.lambda", "plant.lambda entries must be positive");
  }
  if (!(cfg.u_max > 0.0)) {
    p.fail_key("plant.u_max", "plant.u_max must be positive");
  }
  if (!is_hurwitz(cfg.A_m)) {
    p.fail_key("reference.A_m", "reference.A_m not Hurwitz");
  }
  {
    Eigen::ColPivHouseholderQR<Mat> qr(cfg.B_m);
    if (qr.rank() != cfg.B_m.cols()) {
      p.fail_key("reference.B_m", "reference.B_m not full column rank");
    }
  }
  auto check_psd = [&](const Mat& m, const std::string& key, bool strict) {
    const Mat sym = symmetrize(m);
    if ((m - sym).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
      p.fail_key(key, key + " not symmetric");
    }
    const double lo = min_eig_sym(sym);
    if (strict ? !(lo > 0.0) : lo < -1e-10) {
      p.fail_key(key, key + (strict ? " not PD" : " not PSD"));
    }
  };
  check_psd(cfg.Q, "weights.Q", false);
  check_psd(cfg.Q_f, "weights.Q_f", false);
  check_psd(cfg.R, "weights.R", true);
  check_psd(cfg.Q_lyap, "tuner.Q_lyap", true);
  if (!(cfg.gamma > 0.0) || !(cfg.beta > 0.0)) {
    p.fail_key("tuner.gamma", "tuner.gamma and tuner.beta must be positive");
  }
  if (!(cfg.step_h > 0.0)) {
    p.fail_key("schedule.h", "schedule.h must be positive");
  }
  if (cfg.t_adap < 0.0 || cfg.t_mpc < 0.0) {
    p.fail_key("schedule.t_adap", "schedule.t_adap and schedule.t_mpc must be non-negative");
  }
  if (cfg.t_mpc > 0.0) {
    if (!(cfg.delta_s > 0.0) || cfg.delta_s > cfg.horizon) {
      p.fail_key("schedule.delta_s", "schedule.delta_s must satisfy 0 < delta_s <= horizon");
    }
    if (!near_multiple(cfg.delta_s, cfg.step_h) || !near_multiple(cfg.horizon, cfg.step_h)) {
      p.fail_key("schedule.delta_s",
                 "schedule.delta_s and schedule.horizon must be multiples of schedule.h");
    }
  }
  return cfg;
}

}  // namespace adaptrack
