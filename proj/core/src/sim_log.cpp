#include "adaptrack/sim_log.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "adaptrack/csv.hpp"
#include "adaptrack/errors.hpp"

namespace adaptrack {

namespace {

void append_block(std::string& line, const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    line += ',';
    line += g17(v(i));
  }
}

double parse_number(const std::string& field, const std::string& path, std::size_t line_no) {
  char* end = nullptr;
  const double value = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0') {
    throw Error(path + ":" + std::to_string(line_no) + ": bad numeric field '" + field + "'");
  }
  return value;
}

}  // namespace

SimLog::SimLog(int n_x, int n_u) : n_x_(n_x), n_u_(n_u) {
  if (n_x <= 0 || n_u <= 0) {
    throw DimensionMismatch("SimLog: dimensions must be positive");
  }
}

void SimLog::append(double t, const Vec& x_p, const Vec& x_m, const Vec& x_d, const Vec& u,
                    const Vec& u_sat, const Vec& delta_u, double theta_err, double lyapunov,
                    Phase phase) {
  if (x_p.size() != n_x_ || x_m.size() != n_x_ || x_d.size() != n_x_) {
    throw DimensionMismatch("SimLog::append: state column size mismatch");
  }
  if (u.size() != n_u_ || u_sat.size() != n_u_ || delta_u.size() != n_u_) {
    throw DimensionMismatch("SimLog::append: input column size mismatch");
  }
  if (!t_.empty() && !(t > t_.back())) {
    throw Error("SimLog::append: t must be strictly increasing");
  }
  t_.push_back(t);
  x_p_.push_back(x_p);
  x_m_.push_back(x_m);
  x_d_.push_back(x_d);
  u_.push_back(u);
  u_sat_.push_back(u_sat);
  delta_u_.push_back(delta_u);
  theta_err_.push_back(theta_err);
  lyapunov_.push_back(lyapunov);
  phase_.push_back(phase);
}

void SimLog::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("SimLog::write_csv: cannot open " + path);
  }
  std::string header = "t";
  auto name_block = [&header](const char* stem, int count) {
    for (int i = 0; i < count; ++i) {
      header += ',';
      header += stem;
      header += std::to_string(i);
    }
  };
  name_block("xp", n_x_);
  name_block("xm", n_x_);
  name_block("xd", n_x_);
  name_block("u", n_u_);
  name_block("usat", n_u_);
  name_block("du", n_u_);
  header += ",theta_err_norm,lyapunov,phase\n";
  out << header;

  for (std::size_t i = 0; i < rows(); ++i) {
    std::string line = g17(t_[i]);
    append_block(line, x_p_[i]);
    append_block(line, x_m_[i]);
    append_block(line, x_d_[i]);
    append_block(line, u_[i]);
    append_block(line, u_sat_[i]);
    append_block(line, delta_u_[i]);
    line += ',';
    line += g17(theta_err_[i]);
    line += ',';
    line += g17(lyapunov_[i]);
    line += ',';
    line += phase_[i] == Phase::Msac ? "MSAC" : "MPC";
    line += '\n';
    out << line;
  }
}

SimLog SimLog::read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("SimLog::read_csv: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw EmptyOrDegenerateLog("SimLog::read_csv: empty file " + path);
  }
  const auto header = split_csv_line(line);
  int n_x = 0;
  int n_u = 0;
  for (const auto& name : header) {
    if (name.rfind("xp", 0) == 0) ++n_x;
    if (name.size() > 1 && name[0] == 'u' && std::isdigit(static_cast<unsigned char>(name[1]))) {
      ++n_u;
    }
  }
  if (n_x == 0 || n_u == 0) {
    throw Error("SimLog::read_csv: unrecognized header in " + path);
  }
  const std::size_t expected = 1 + 3 * static_cast<std::size_t>(n_x) +
                               3 * static_cast<std::size_t>(n_u) + 3;
  if (header.size() != expected) {
    throw Error("SimLog::read_csv: unexpected column count in " + path);
  }

  SimLog log(n_x, n_u);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != expected) {
      throw Error(path + ":" + std::to_string(line_no) + ": unexpected field count");
    }
    std::size_t pos = 0;
    auto next = [&]() { return parse_number(fields[pos++], path, line_no); };
    auto next_vec = [&](int n) {
      Vec v(n);
      for (int i = 0; i < n; ++i) v(i) = next();
      return v;
    };
    const double t = next();
    const Vec x_p = next_vec(n_x);
    const Vec x_m = next_vec(n_x);
    const Vec x_d = next_vec(n_x);
    const Vec u = next_vec(n_u);
    const Vec u_sat = next_vec(n_u);
    const Vec du = next_vec(n_u);
    const double theta_err = next();
    const double lyapunov = next();
    const std::string& phase_str = fields[pos];
    Phase phase;
    if (phase_str == "MSAC") {
      phase = Phase::Msac;
    } else if (phase_str == "MPC") {
      phase = Phase::Mpc;
    } else {
      throw Error(path + ":" + std::to_string(line_no) + ": unknown phase '" + phase_str + "'");
    }
    log.append(t, x_p, x_m, x_d, u, u_sat, du, theta_err, lyapunov, phase);
  }
  return log;
}

}  // namespace adaptrack
