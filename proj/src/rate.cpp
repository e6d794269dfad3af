#include "sclaw/rate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "sclaw/errors.hpp"
#include "sclaw/harness.hpp"
#include "sclaw/numerics.hpp"
#include "sclaw/solvers.hpp"

namespace sclaw {

double action(const Control& h) {
  NeumaierSum s;
  for (double v : h.values()) s += v * v;
  return 0.5 * s.value() / h.bins();
}

double skeleton_residual(const Control& h, const Trajectory& rho_target, const NoiseModel& noise,
                         const ScalarField& eta) {
  if (!(eta.grid() == rho_target.grid())) throw PreconditionError("skeleton_residual: grid mismatch");
  const auto path = solve_skeleton(eta, h, noise, rho_target.times());
  return l1l1_distance(path, rho_target);
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Minimises R(h) + λ·residual² from x in place; returns the accepted Φ values.
std::vector<double> descend(std::vector<double>& x, int K, int B, double lambda, const RateOptions& opt,
                            const std::function<double(const std::vector<double>&)>& residual_of) {
  const std::size_t n = x.size();
  auto phi = [&](const std::vector<double>& y) {
    const double r = residual_of(y);
    const double value = action(Control(K, B, y)) + lambda * r * r;
    if (!std::isfinite(value)) throw NumericalFailure("rate_estimate: non-finite objective");
    return value;
  };
  std::vector<double> trace;
  double f = phi(x);
  trace.push_back(f);
  auto g = fd_gradient(phi, x, opt.fd_step);
  std::vector<double> H(n * n, 0.0);
  bool fresh = true;
  auto reset_metric = [&] {
    fresh = true;
    std::fill(H.begin(), H.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;
  };
  reset_metric();
  int stalls = 0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    std::vector<double> x_new(n);
    double f_new = f;
    bool accepted = false;
    // BFGS direction first; on failure retry once along -g with a fresh metric.
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      std::vector<double> d(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i] -= H[i * n + j] * g[j];
      if (attempt == 1 || dot(d, g) >= 0.0) {
        reset_metric();
        for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      }
      const double slope = dot(d, g);
      if (!(slope < 0.0)) break;
      double t = 1.0;
      for (int ls = 0; ls < 60; ++ls) {
        for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + t * d[i];
        f_new = phi(x_new);
        if (f_new <= f + 1e-4 * t * slope) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
    }
    if (!accepted || f_new > f) break;

    const auto g_new = fd_gradient(phi, x_new, opt.fd_step);
    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-300) {
      if (fresh) {
        const double scale = sy / dot(y, y);
        for (std::size_t i = 0; i < n; ++i) H[i * n + i] = scale;
        fresh = false;
      }
      // H <- (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ
      const double rho = 1.0 / sy;
      std::vector<double> Hy(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) Hy[i] += H[i * n + j] * y[j];
      const double yHy = dot(y, Hy);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          H[i * n + j] += -rho * (s[i] * Hy[j] + Hy[i] * s[j]) + (rho * rho * yHy + rho) * s[i] * s[j];
    }
    const double decrease = f - f_new;
    x = x_new;
    g = g_new;
    f = f_new;
    trace.push_back(f);
    stalls = decrease <= 1e-15 * (1.0 + std::fabs(f)) ? stalls + 1 : 0;
    if (stalls >= 3) break;
  }
  return trace;
}

// Piecewise-constant resampling onto `bins` bins by bin midpoints.
Control resample(const Control& h, int bins) {
  Control out(h.modes(), bins);
  for (int b = 0; b < bins; ++b) {
    const int src = h.bin_of((b + 0.5) / bins);
    for (int k = 0; k < h.modes(); ++k) out.at(k, b) = h.at(k, src);
  }
  return out;
}

}  // namespace

RateResult rate_estimate(const Trajectory& rho_target, int K, int B, const RateOptions& opt, const NoiseModel& noise,
                         const ScalarField& eta, const Control* warm_start) {
  if (K != noise.K()) throw PreconditionError("rate_estimate: K must match the noise model");
  if (K < 1 || B < 1 || K * B > 512) throw ConfigError("invalid value for key: rate.bins (K*B must lie in [1, 512])");
  if (opt.lambda_ladder.empty()) throw ConfigError("invalid value for key: rate.lambda_ladder");
  for (std::size_t i = 0; i < opt.lambda_ladder.size(); ++i)
    if (!(opt.lambda_ladder[i] > 0.0) || (i > 0 && !(opt.lambda_ladder[i] > opt.lambda_ladder[i - 1])))
      throw ConfigError("invalid value for key: rate.lambda_ladder (must be positive and increasing)");
  if (!(opt.tol_feas > 0.0)) throw ConfigError("invalid value for key: rate.tol_feas");
  if (rho_target.size() < static_cast<std::size_t>(B) + 1)
    throw PreconditionError("rate_estimate: target needs at least B time steps");

  // Bin levels from coarse to fine: B, B/2, ... while even, reversed.
  std::vector<int> levels{B};
  if (warm_start == nullptr)
    while (levels.back() % 2 == 0) levels.push_back(levels.back() / 2);
  std::reverse(levels.begin(), levels.end());

  RateResult result;
  Control h = warm_start != nullptr ? *warm_start : Control(K, levels.front());
  if (warm_start != nullptr && (warm_start->modes() != K || warm_start->bins() != B))
    throw PreconditionError("rate_estimate: warm start shape");

  double best_residual = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  for (std::size_t level = 0; level < levels.size(); ++level) {
    const int bins = levels[level];
    if (h.bins() != bins) h = resample(h, bins);
    auto residual_of = [&](const std::vector<double>& y) {
      return skeleton_residual(Control(K, bins, y), rho_target, noise, eta);
    };
    std::vector<double> x = h.values();
    // The full λ ladder runs once; refined levels and explicit warm starts continue at the last rung.
    const bool full = level == 0 && warm_start == nullptr;
    const std::size_t first = full ? 0 : opt.lambda_ladder.size() - 1;
    for (std::size_t l = first; l < opt.lambda_ladder.size(); ++l) {
      result.objective_trace.push_back(descend(x, K, bins, opt.lambda_ladder[l], opt, residual_of));
      if (bins == B) {
        const double r = residual_of(x);
        if (r < best_residual) {
          best_residual = r;
          best_x = x;
        }
      }
    }
    h = Control(K, bins, x);
  }
  std::vector<double> x = h.values();
  auto residual_of = [&](const std::vector<double>& y) {
    return skeleton_residual(Control(K, B, y), rho_target, noise, eta);
  };

  const double final_residual = residual_of(x);
  result.h_opt = Control(K, B, x);
  result.residual = final_residual;
  result.feasible = final_residual <= opt.tol_feas;
  if (result.feasible) {
    result.I_hat = action(result.h_opt);
  } else {
    result.I_hat = std::numeric_limits<double>::infinity();
    result.residual = best_residual;
    result.h_opt = Control(K, B, best_x);
  }
  return result;
}

}  // namespace sclaw
