#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adaptrack/exo_signal.hpp"
#include "adaptrack/types.hpp"

namespace adaptrack {

// Flat dotted-key experiment configuration. Matrices are row-major value
// lists; unknown keys are rejected. parse_config validates dimensions and
// definiteness before any simulation starts.
struct ExperimentConfig {
  int n_x = 0;
  int n_u = 0;

  // plant.*
  Mat A_p;
  Mat B_p;
  Vec lambda;
  double u_max = 0.0;
  Vec x0;

  // reference.*
  Mat A_m;
  Mat B_m;

  // weights.*
  Mat Q;
  Mat R;
  Mat Q_f;

  // exo.ch<i>: flat (amplitude, omega, phase) triples per channel
  std::vector<std::vector<SinTerm>> exo_channels;

  // tuner.*
  double gamma = 1.0;
  double beta = 1.0;
  Mat Q_lyap;
  double init_scale = 0.8;
  std::optional<Mat> theta0;  // explicit initializer, overrides init_scale

  // schedule.*
  double step_h = 1e-3;
  double t_adap = 0.0;
  double t_mpc = 0.0;
  double delta_s = 0.1;
  double horizon = 0.0;

  // output.*
  std::string out_dir = "out";
  std::string prefix;
  bool plots = false;

  long seed = 0;
};

ExperimentConfig parse_config(const std::string& path);

}  // namespace adaptrack
