#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "adaptrack/config.hpp"
#include "adaptrack/errors.hpp"
#include "adaptrack/lqt.hpp"
#include "adaptrack/pipeline.hpp"
#include "adaptrack/plots.hpp"
#include "section_v.hpp"

using namespace adaptrack;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& stem) {
    path = fs::temp_directory_path() / (stem + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string shipped_config() { return std::string(ADAPTRACK_CONFIG_DIR) + "/sectionv.cfg"; }

// Short-schedule variant of the shipped example for harness tests.
std::string key_of(const std::string& line) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    return "";
  }
  std::string key = line.substr(0, eq);
  while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) {
    key.pop_back();
  }
  return key;
}

std::string write_config(const fs::path& dir, const std::string& name,
                         const std::string& overrides, const std::string& drop_key = "") {
  std::ifstream in(shipped_config());
  REQUIRE(in.good());
  std::ostringstream body;
  std::string line;
  while (std::getline(in, line)) {
    const std::string key = key_of(line);
    if (!drop_key.empty() && key == drop_key) {
      continue;
    }
    bool overridden = false;
    std::istringstream overrides_stream(overrides);
    std::string override_line;
    while (std::getline(overrides_stream, override_line)) {
      if (!key.empty() && key_of(override_line) == key) {
        overridden = true;
        break;
      }
    }
    if (!overridden) {
      body << line << '\n';
    }
  }
  body << overrides << '\n';
  const fs::path path = dir / name;
  std::ofstream out(path);
  out << body.str();
  return path.string();
}

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Minimal well-formedness scan for the emitted SVG files: tags balance and
// the root element is <svg>.
bool svg_well_formed(const std::string& text) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  bool saw_svg_root = false;
  while ((pos = text.find('<', pos)) != std::string::npos) {
    const std::size_t end = text.find('>', pos);
    if (end == std::string::npos) {
      return false;
    }
    std::string tag = text.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty()) {
      return false;
    }
    if (tag.front() == '?') {
      continue;  // declaration
    }
    if (tag.front() == '/') {
      const std::string name = tag.substr(1);
      if (stack.empty() || stack.back() != name) {
        return false;
      }
      stack.pop_back();
      continue;
    }
    if (tag.back() == '/') {
      continue;  // self-closing
    }
    const std::string name = tag.substr(0, tag.find_first_of(" \t\n"));
    if (stack.empty() && name == "svg") {
      saw_svg_root = true;
    }
    stack.push_back(name);
  }
  return stack.empty() && saw_svg_root;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("shipped config round-trips the example values") {
  const ExperimentConfig cfg = parse_config(shipped_config());
  CHECK(cfg.n_x == 2);
  CHECK(cfg.n_u == 2);
  CHECK((cfg.A_p - testfix::a_p()).norm() == 0.0);
  CHECK((cfg.B_p - Mat::Identity(2, 2)).norm() == 0.0);
  CHECK((cfg.lambda - Vec::Ones(2)).norm() == 0.0);
  CHECK(cfg.u_max == 8.0);
  CHECK((cfg.A_m - testfix::a_m()).norm() == 0.0);
  CHECK((cfg.Q - 20.0 * Mat::Identity(2, 2)).norm() == 0.0);
  CHECK((cfg.R - Mat::Identity(2, 2)).norm() == 0.0);
  CHECK(cfg.t_adap == 32.0 * M_PI);  // 17 significant digits round-trip
  CHECK(cfg.t_mpc == 8.0);
  CHECK(cfg.delta_s == 0.1);
  CHECK(cfg.gamma == testfix::kGamma);
  CHECK(cfg.beta == testfix::kBeta);
  CHECK(cfg.init_scale == 0.8);
  REQUIRE(cfg.exo_channels.size() == 2);
  CHECK(cfg.exo_channels[0].size() == 4);
  CHECK(cfg.exo_channels[1].size() == 3);
  CHECK(cfg.exo_channels[0][3].omega == 7.0);
}

TEST_CASE("missing keys are reported by name") {
  TempDir dir("adaptrack_cfg_missing");
  const std::string path = write_config(dir.path, "missing.cfg", "", "plant.u_max");
  CHECK_THROWS_WITH_AS(parse_config(path), doctest::Contains("plant.u_max"), ConfigError);
}

TEST_CASE("indefinite weights are reported by name") {
  TempDir dir("adaptrack_cfg_psd");
  const std::string path =
      write_config(dir.path, "badq.cfg", "weights.Q = 1 0  0 -1");
  CHECK_THROWS_WITH_AS(parse_config(path), doctest::Contains("weights.Q not PSD"), ConfigError);
}

TEST_CASE("unknown keys are rejected") {
  TempDir dir("adaptrack_cfg_unknown");
  const std::string path = write_config(dir.path, "unknown.cfg", "plant.umax_typo = 8");
  CHECK_THROWS_WITH_AS(parse_config(path), doctest::Contains("unknown key"), ConfigError);
}

TEST_CASE("matrix size mismatches are rejected") {
  TempDir dir("adaptrack_cfg_dims");
  const std::string path = write_config(dir.path, "dims.cfg", "plant.A_p = 1 1 0");
  CHECK_THROWS_AS(parse_config(path), ConfigError);
}

TEST_CASE("non-hurwitz reference matrices are rejected") {
  TempDir dir("adaptrack_cfg_hurwitz");
  const std::string path = write_config(dir.path, "am.cfg", "reference.A_m = 1 0  0 -2");
  CHECK_THROWS_WITH_AS(parse_config(path), doctest::Contains("reference.A_m"), ConfigError);
}

TEST_CASE("short pipeline run is deterministic and self-consistent") {
  TempDir dir("adaptrack_pipeline");
  const std::string overrides_a =
      "schedule.t_adap = 6.2831853071795862\n"
      "schedule.t_mpc = 0.5\n"
      "schedule.horizon = 2\n"
      "output.dir = " + (dir.path / "a").string() + "\n"
      "output.plots = 0";
  const std::string overrides_b =
      "schedule.t_adap = 6.2831853071795862\n"
      "schedule.t_mpc = 0.5\n"
      "schedule.horizon = 2\n"
      "output.dir = " + (dir.path / "b").string() + "\n"
      "output.plots = 0";
  const std::string cfg_a = write_config(dir.path, "a.cfg", overrides_a);
  const std::string cfg_b = write_config(dir.path, "b.cfg", overrides_b);

  const ExperimentConfig parsed_a = parse_config(cfg_a);
  const RunReport report_a = run_pipeline(parsed_a);
  const RunReport report_b = run_pipeline(parse_config(cfg_b));

  // Byte-identical logs across runs of the same configuration.
  for (const char* name : {"msac.csv", "mpc.csv", "oracle.csv", "pe.csv", "gap.csv"}) {
    const std::string lhs = (dir.path / "a" / name).string();
    const std::string rhs = (dir.path / "b" / name).string();
    INFO(name);
    CHECK(file_bytes(lhs) == file_bytes(rhs));
  }

  // Phase boundary: the adaptive log ends exactly where the optimizing log
  // begins, in both time and state.
  const SimLog msac_log = SimLog::read_csv((dir.path / "a" / "msac.csv").string());
  const SimLog mpc_log = SimLog::read_csv((dir.path / "a" / "mpc.csv").string());
  const std::size_t last = msac_log.rows() - 1;
  CHECK(msac_log.t(last) == mpc_log.t(0));
  CHECK((msac_log.x_p(last) - mpc_log.x_p(0)).norm() == 0.0);

  // The reported gap equals a recomputation from the emitted CSVs.
  const SimLog oracle_log = SimLog::read_csv((dir.path / "a" / "oracle.csv").string());
  const ExoSignal exo(parsed_a.exo_channels);
  const LQTWeights w(parsed_a.Q, parsed_a.R, parsed_a.Q_f);
  const double recomputed =
      quadrature_cost(mpc_log, w, exo) - quadrature_cost(oracle_log, w, exo);
  CHECK(std::abs(recomputed - report_a.gap) <= 1e-9);
  CHECK(report_a.pe_verdict.has_value());
  CHECK(report_a.theta_err_at_switch < report_a.theta_err_initial);
}

TEST_CASE("explicit theta0 overrides the scaled initializer") {
  TempDir dir("adaptrack_theta0");
  const std::string overrides =
      "tuner.theta0 = -2 0 1 0 1 0  0 -3 0 1 0 1\n"  // the exact gains, row-major
      "schedule.t_adap = 0\n"
      "schedule.t_mpc = 0.2\n"
      "schedule.horizon = 2\n"
      "output.dir = " + (dir.path / "out").string() + "\n"
      "output.plots = 0";
  const std::string path = write_config(dir.path, "theta0.cfg", overrides);
  const ExperimentConfig cfg = parse_config(path);
  REQUIRE(cfg.theta0.has_value());
  const RunReport report = run_pipeline(cfg);
  CHECK(report.theta_err_initial == 0.0);  // init_scale = 0.8 was overridden
  CHECK(std::abs(report.gap) <= 1e-6);
}

TEST_CASE("zero adaptation with exact initial estimates is a pure-mpc run") {
  TempDir dir("adaptrack_pure_mpc");
  const std::string overrides =
      "schedule.t_adap = 0\n"
      "schedule.t_mpc = 0.5\n"
      "schedule.horizon = 2\n"
      "tuner.init_scale = 1.0\n"
      "output.dir = " + (dir.path / "out").string() + "\n"
      "output.plots = 0";
  const std::string path = write_config(dir.path, "pure.cfg", overrides);
  const RunReport report = run_pipeline(parse_config(path));
  CHECK(report.theta_err_at_switch == 0.0);
  CHECK(std::abs(report.gap) <= 1e-6);
  CHECK_FALSE(report.pe_verdict.has_value());
}

TEST_CASE("constant signal yields a negative pe verdict but completes") {
  TempDir dir("adaptrack_const_xd");
  const std::string overrides =
      "exo.ch0 = 1 0 1.5707963267948966\n"
      "exo.ch1 = 0.5 0 1.5707963267948966\n"
      "schedule.t_adap = 6.2831853071795862\n"
      "schedule.t_mpc = 0.2\n"
      "schedule.horizon = 2\n"
      "output.dir = " + (dir.path / "out").string() + "\n"
      "output.plots = 0";
  const std::string path = write_config(dir.path, "const.cfg", overrides);
  const RunReport report = run_pipeline(parse_config(path));
  REQUIRE(report.pe_verdict.has_value());
  CHECK_FALSE(*report.pe_verdict);
  CHECK(report.v_star >= 0.0);
}

TEST_CASE("full figure set is emitted and well-formed") {
  TempDir dir("adaptrack_plots");
  const std::string overrides =
      "schedule.t_adap = 6.2831853071795862\n"
      "schedule.t_mpc = 0.5\n"
      "schedule.horizon = 2\n"
      "output.dir = " + (dir.path / "out").string() + "\n"
      "output.plots = 1";
  const std::string path = write_config(dir.path, "plots.cfg", overrides);
  const RunReport report = run_pipeline(parse_config(path));

  std::vector<std::string> svgs;
  for (const auto& artifact : report.artifacts) {
    if (artifact.size() > 4 && artifact.substr(artifact.size() - 4) == ".svg") {
      svgs.push_back(artifact);
    }
  }
  REQUIRE(svgs.size() == 5);
  for (const auto& svg : svgs) {
    INFO(svg);
    CHECK(svg_well_formed(file_bytes(svg)));
  }
}

TEST_CASE("adaptive-only runs emit the phase-one figures") {
  TempDir dir("adaptrack_plots_msac_only");
  const std::string overrides =
      "schedule.t_adap = 6.2831853071795862\n"
      "schedule.t_mpc = 0\n"
      "output.dir = " + (dir.path / "out").string() + "\n"
      "output.plots = 1";
  const std::string path = write_config(dir.path, "msac_only.cfg", overrides);
  const RunReport report = run_pipeline(parse_config(path));
  int svgs = 0;
  for (const auto& artifact : report.artifacts) {
    svgs += artifact.size() > 4 && artifact.substr(artifact.size() - 4) == ".svg";
  }
  CHECK(svgs == 3);  // no post-switch overlays without a post-switch phase
}

TEST_CASE("non-positive lambda estimates abort the switch") {
  TempDir dir("adaptrack_bad_lambda");
  const std::string overrides =
      "schedule.t_adap = 0\n"
      "schedule.t_mpc = 0.5\n"
      "schedule.horizon = 2\n"
      "tuner.init_scale = -0.5\n"
      "output.dir = " + (dir.path / "out").string() + "\n"
      "output.plots = 0";
  const std::string path = write_config(dir.path, "bad.cfg", overrides);
  CHECK_THROWS_AS(run_pipeline(parse_config(path)), NonPositiveLambdaEstimate);
}

TEST_CASE("degenerate logs cannot be plotted") {
  SimLog log(2, 2);
  log.append(0.0, Vec::Zero(2), Vec::Zero(2), Vec::Zero(2), Vec::Zero(2), Vec::Zero(2),
             Vec::Zero(2), 0.0, 0.0, Phase::Msac);
  TempDir dir("adaptrack_plot_degenerate");
  CHECK_THROWS_AS(emit_single_log_plots(log, 8.0, dir.path.string(), "x_"),
                  EmptyOrDegenerateLog);
}

TEST_CASE("delta sweep emits monotone non-negative gap rows") {
  TempDir dir("adaptrack_sweep");
  const std::string overrides =
      "schedule.t_adap = 0\n"
      "schedule.t_mpc = 0.5\n"
      "schedule.horizon = 2\n"
      "output.dir = " + (dir.path / "out").string() + "\n"
      "output.plots = 0";
  const std::string path = write_config(dir.path, "sweep.cfg", overrides);
  const ExperimentConfig cfg = parse_config(path);
  const SweepResult sweep = run_delta_sweep(cfg, {0.2, 0.1, 0.0}, 2);
  REQUIRE(sweep.rows.size() == 3);
  CHECK(sweep.rows[0].delta == 0.2);
  CHECK(sweep.rows[2].gap == 0.0);  // exact parameters, identical code path
  CHECK(sweep.rows[0].gap > sweep.rows[1].gap);
  CHECK(fs::exists(sweep.csv_path));
}

}  // TEST_SUITE
