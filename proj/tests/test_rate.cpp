#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "sclaw/errors.hpp"
#include "sclaw/rate.hpp"
#include "sclaw/solvers.hpp"

using namespace sclaw;

namespace {

const NoiseModel kAdditive({{1.0, Profile::constant, 1, 1.0, 0.0}});

Trajectory drift_target(const ScalarField& eta, double slope, int steps = 100) {
  Trajectory t(eta.grid());
  for (int n = 0; n <= steps; ++n) {
    const double s = static_cast<double>(n) / steps;
    std::vector<double> v(eta.values().begin(), eta.values().end());
    for (auto& x : v) x += slope * s;
    t.append(s, ScalarField(eta.grid(), std::move(v)));
  }
  return t;
}

// Constant controls c on a 1e-3 grid: the smallest action whose residual meets the tolerance.
double grid_search_oracle(const Trajectory& target, const ScalarField& eta, double tol) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 2000; ++k) {
    const double c = k * 1e-3;
    const auto h = Control::constant(1, 1, c);
    if (skeleton_residual(h, target, kAdditive, eta) <= tol) best = std::min(best, action(h));
  }
  return best;
}

}  // namespace

TEST_CASE("action closed form") {
  CHECK(action(Control(1, 8)) == 0.0);
  CHECK(action(Control::constant(1, 8, 0.3)) == doctest::Approx(0.045));
  Control h(2, 4);
  for (int b = 0; b < 4; ++b) {
    h.at(0, b) = 1.0;
    h.at(1, b) = 2.0;
  }
  CHECK(action(h) == doctest::Approx(2.5));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  for (int t = 0; t < 20; ++t) {
    Control r(2, 5);
    for (auto& v : r.values()) v = d(rng);
    CHECK(action(r) > 0.0);
  }
}

TEST_CASE("control helpers") {
  Control h(1, 4, {1, 2, 3, 4});
  CHECK(h.bin_of(0.0) == 0);
  CHECK(h.bin_of(0.26) == 1);
  CHECK(h.bin_of(1.0) == 3);
  auto r = h.refined();
  CHECK(r.bins() == 8);
  CHECK(r.at(0, 5) == 3.0);
  CHECK(action(r) == doctest::Approx(action(h)));
  CHECK_THROWS_AS(Control(1, 2, {1.0}), PreconditionError);
  CHECK_THROWS_AS(Control(1, 0), PreconditionError);
}

TEST_CASE("skeleton residual") {
  TorusGrid g(8);
  auto eta = ScalarField::constant(g, 0.3);
  auto h = Control::constant(1, 4, 0.6);
  auto self = solve_skeleton(eta, h, kAdditive, 100);
  CHECK(skeleton_residual(h, self, kAdditive, eta) <= 1e-12);
  CHECK(skeleton_residual(Control(1, 4), drift_target(eta, 0.0), kAdditive, eta) == 0.0);
  CHECK(skeleton_residual(Control(1, 4), drift_target(eta, 1.0), kAdditive, eta) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("rate oracle: constant drift") {
  TorusGrid g(16);
  auto eta = ScalarField::constant(g, 0.0);
  auto target = drift_target(eta, 0.7);
  auto r = rate_estimate(target, 1, 16, RateOptions{}, kAdditive, eta);
  CHECK(r.feasible);
  CHECK(std::fabs(r.I_hat - 0.245) <= 1e-3);
  for (double v : r.h_opt.values()) CHECK(v == doctest::Approx(0.7).epsilon(0.01));
  CHECK(r.residual <= RateOptions{}.tol_feas);
  CHECK(std::fabs(grid_search_oracle(target, eta, 1e-6) - 0.245) <= 1e-3);

  // descent property inside every λ block
  for (const auto& block : r.objective_trace)
    for (std::size_t i = 1; i < block.size(); ++i) CHECK(block[i] <= block[i - 1]);
}

TEST_CASE("rate: trivial and infeasible targets") {
  TorusGrid g(8);
  auto eta = ScalarField::constant(g, 0.2);
  auto still = rate_estimate(drift_target(eta, 0.0), 1, 8, RateOptions{}, kAdditive, eta);
  CHECK(still.feasible);
  CHECK(still.I_hat <= 1e-6);
  for (double v : still.h_opt.values()) CHECK(std::fabs(v) < 1e-3);

  NoiseModel frozen({{0.0, Profile::constant, 1, 1.0, 0.0}});
  auto none = rate_estimate(drift_target(eta, 0.7), 1, 4, RateOptions{}, frozen, eta);
  CHECK_FALSE(none.feasible);
  CHECK(std::isinf(none.I_hat));
  CHECK(none.I_hat > 0);
  CHECK(none.residual == doctest::Approx(0.35).epsilon(1e-9));
}

TEST_CASE("rate: refinement with warm start does not increase the estimate") {
  TorusGrid g(8);
  auto eta = ScalarField::constant(g, 0.0);
  // reachable from a two-bin control, so both resolutions are feasible; I = (0.5² + 1²)/4
  const auto target = solve_skeleton(eta, Control(1, 2, {0.5, 1.0}), kAdditive, 100);
  auto coarse = rate_estimate(target, 1, 4, RateOptions{}, kAdditive, eta);
  REQUIRE(coarse.feasible);
  const auto warm = coarse.h_opt.refined();
  auto fine = rate_estimate(target, 1, 8, RateOptions{}, kAdditive, eta, &warm);
  REQUIRE(fine.feasible);
  CHECK(fine.I_hat <= coarse.I_hat + 1e-6);
  CHECK(fine.I_hat == doctest::Approx(0.3125).epsilon(1e-2));
  const Control wrong(1, 4);
  CHECK_THROWS_AS(rate_estimate(target, 1, 8, RateOptions{}, kAdditive, eta, &wrong), PreconditionError);
}

TEST_CASE("finite-difference gradient against a one-sided secant") {
  TorusGrid g(4);
  auto eta = ScalarField::constant(g, 0.0);
  auto target = drift_target(eta, 0.7);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(1.0, 2.0);  // always above the target: smooth residual
  for (int dim : {4, 16, 32}) {
    std::vector<double> x(dim);
    for (auto& v : x) v = d(rng);
    auto phi = [&](const std::vector<double>& y) {
      const double r = skeleton_residual(Control(1, dim, y), target, kAdditive, eta);
      return action(Control(1, dim, y)) + 100.0 * r * r;
    };
    const auto gfd = fd_gradient(phi, x, 1e-4);
    const double f0 = phi(x);
    double scale = 0;
    for (double v : gfd) scale = std::max(scale, std::fabs(v));
    for (int i = 0; i < dim; ++i) {
      auto y = x;
      y[i] += 1e-7;
      const double secant = (phi(y) - f0) / 1e-7;
      CHECK(std::fabs(secant - gfd[i]) <= 1e-5 * scale);
    }
  }
}

TEST_CASE("rate preconditions") {
  TorusGrid g(4);
  auto eta = ScalarField::constant(g, 0.0);
  auto target = drift_target(eta, 0.7);
  CHECK_THROWS_AS(rate_estimate(target, 1, 600, RateOptions{}, kAdditive, eta), ConfigError);
  auto shortt = drift_target(eta, 0.7, 4);
  CHECK_THROWS_AS(rate_estimate(shortt, 1, 16, RateOptions{}, kAdditive, eta), PreconditionError);
}
