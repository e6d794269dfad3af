#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sclaw/flux.hpp"
#include "sclaw/harness.hpp"
#include "sclaw/initial.hpp"
#include "sclaw/noise.hpp"
#include "sclaw/sim_config.hpp"

namespace sclaw::cli {

struct FluxSpec {
  FluxKind kind = FluxKind::burgers;
  double q0 = 2.0;
  double N = 1.0;
  double speed = 1.0;
  std::vector<double> coefficients;
  FluxModel build() const;
};

struct NoiseSpec {
  std::vector<NoiseMode> modes;
  double R_val = 10.0;
  int lattice_n = 1024;
};

struct MollifierSpec {
  double gamma = 0.1;
  double delta = 0.1;
  std::vector<std::pair<double, double>> ladder{{0.1, 0.1}, {0.05, 0.05}, {0.025, 0.025}};
};

struct HarnessSpec {
  std::optional<double> iota;
  std::size_t paths = 1000;
  std::vector<double> ladder{0.5, 0.2, 0.1, 0.05};
  std::vector<double> moment_p;
  std::vector<double> moment_ladder{1.0, 0.5, 0.1};
  std::size_t moment_paths = 500;
  std::vector<Functional> functionals{Functional::mass, Functional::l2norm};
  std::size_t bound_paths = 50;
  std::size_t martingale_paths = 500;
};

struct RateTarget {
  std::string kind = "linear_drift";  // linear_drift | constant | skeleton
  double slope = 0.7;
  std::vector<double> control;        // K*B values for kind == skeleton, mode-major
  int control_bins = 1;
};

struct RateSpec {
  int bins = 16;
  int steps = 100;
  std::vector<double> lambda_ladder{10.0, 1e2, 1e3, 1e4, 1e5, 1e6};
  double tol_feas = 1e-3;
  double fd_step = 1e-4;
  int max_iterations = 400;
  std::optional<RateTarget> target;
};

struct RunConfig {
  FluxSpec flux;
  NoiseSpec noise;
  InitialSpec initial = SineInitial{};
  SimConfig sim;
  MollifierSpec mollifier;
  HarnessSpec harness;
  RateSpec rate;

  ModelBundle models() const;
};

/// Parses a configuration document. Unknown keys and wrongly typed values
/// throw ConfigError naming the dotted key.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// Fully resolved document; parse_config(resolved_json(c)) reproduces c.
nlohmann::json resolved_json(const RunConfig& cfg);

}  // namespace sclaw::cli
