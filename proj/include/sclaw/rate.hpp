#pragma once

#include <vector>

#include "sclaw/control.hpp"
#include "sclaw/grid.hpp"
#include "sclaw/noise.hpp"

namespace sclaw {

/// R(h) = ½ Σ_k Σ_b h_k[b]² / B.
double action(const Control& h);

/// l1l1_distance between the skeleton driven by h (from eta, on the target's
/// time grid) and the target trajectory.
double skeleton_residual(const Control& h, const Trajectory& rho_target, const NoiseModel& noise,
                         const ScalarField& eta);

struct RateOptions {
  std::vector<double> lambda_ladder{10.0, 1e2, 1e3, 1e4, 1e5, 1e6};
  double tol_feas = 1e-3;
  double fd_step = 1e-4;
  int max_iterations = 400;
};

struct RateResult {
  /// +inf with feasible == false when no control meets tol_feas.
  double I_hat = 0.0;
  Control h_opt{0, 1};
  double residual = 0.0;
  bool feasible = false;
  /// Φ_λ after every accepted iteration, one block per λ.
  std::vector<std::vector<double>> objective_trace;
};

/// Penalty minimisation of R(h) + λ·residual² over the λ ladder, each rung
/// warm-started from the previous optimum. `warm_start`, when given, must be K×B.
RateResult rate_estimate(const Trajectory& rho_target, int K, int B, const RateOptions& opt, const NoiseModel& noise,
                         const ScalarField& eta, const Control* warm_start = nullptr);

/// Central finite-difference gradient of f at x.
template <class F>
std::vector<double> fd_gradient(F&& f, const std::vector<double>& x, double step) {
  std::vector<double> g(x.size());
  std::vector<double> y = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = x[i] + step;
    const double fp = f(y);
    y[i] = x[i] - step;
    const double fm = f(y);
    y[i] = x[i];
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

}  // namespace sclaw
