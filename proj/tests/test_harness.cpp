#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include "sclaw/errors.hpp"
#include "sclaw/harness.hpp"
#include "sclaw/initial.hpp"
#include "sclaw/rng.hpp"

using namespace sclaw;

namespace {

ModelBundle default_models() {
  ModelBundle m;
  m.flux = FluxModel::burgers();
  m.noise = NoiseModel({{0.1, Profile::constant, 1, 1.0, 0.0}, {1.0, Profile::cosine, 1, 1.0, 0.0}});
  m.initial = ConstantInitial{2.0};
  return m;
}

ModelBundle additive_models() {
  ModelBundle m;
  m.flux = FluxModel::zero();
  m.noise = NoiseModel({{1.0, Profile::constant, 1, 1.0, 0.0}});
  m.initial = SineInitial{0.0, 1.0, 1};
  return m;
}

SimConfig small_config() {
  SimConfig c;
  c.cells = 32;
  return c;
}

Trajectory constant_trajectory(const TorusGrid& g, double c, std::vector<double> times) {
  Trajectory t(g);
  for (double s : times) t.append(s, ScalarField::constant(g, c));
  return t;
}

}  // namespace

TEST_CASE("wilson interval") {
  for (std::size_t hits : {0u, 1u, 17u, 50u, 100u}) {
    auto e = wilson_estimate(hits, 100);
    CHECK(e.p_hat == doctest::Approx(hits / 100.0));
    CHECK(0.0 <= e.ci_lo);
    CHECK(e.ci_lo <= e.p_hat);
    CHECK(e.p_hat <= e.ci_hi);
    CHECK(e.ci_hi <= 1.0);
  }
  double prev = wilson_estimate(100, 400).ci_hi - wilson_estimate(100, 400).ci_lo;
  for (std::size_t n : {1600u, 6400u, 25600u}) {
    auto e = wilson_estimate(n / 4, n);
    const double w = e.ci_hi - e.ci_lo;
    CHECK(w / prev >= 0.4);
    CHECK(w / prev <= 0.6);
    prev = w;
  }
  CHECK_THROWS_AS(wilson_estimate(3, 2), PreconditionError);
}

TEST_CASE("l1l1 distance") {
  TorusGrid g(8);
  auto a = constant_trajectory(g, 0.0, {0, 0.5, 1});
  CHECK(l1l1_distance(a, a) == 0.0);
  CHECK(l1l1_distance(a, constant_trajectory(g, -2.5, {0, 0.5, 1})) == doctest::Approx(2.5));

  // b(t,x) = t·s(x) with ∫|s| = 1/2 on a non-uniform grid: exact for piecewise-linear-in-time integrands
  Trajectory b(g);
  std::vector<double> s(8);
  for (int i = 0; i < 8; ++i) s[i] = i < 4 ? 1.0 : 0.0;
  for (double t : {0.0, 0.1, 0.45, 1.0}) {
    std::vector<double> v(8);
    for (int i = 0; i < 8; ++i) v[i] = t * s[i];
    b.append(t, ScalarField(g, v));
  }
  auto z = constant_trajectory(g, 0.0, {0.0, 0.1, 0.45, 1.0});
  CHECK(std::fabs(l1l1_distance(z, b) - 0.25) <= 1e-12);
  CHECK_THROWS_AS(l1l1_distance(a, z), PreconditionError);
}

TEST_CASE("parallel_for rethrows the lowest failing index") {
  std::vector<int> hit(50, 0);
  parallel_for(50, 4, [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) CHECK(h == 1);
  try {
    parallel_for(40, 3, [](std::size_t i) {
      if (i == 7 || i == 31) throw NumericalFailure("boom " + std::to_string(i));
    });
    FAIL("expected a throw");
  } catch (const NumericalFailure& e) {
    CHECK(std::string(e.what()) == "boom 7");
  }
}

TEST_CASE("tail estimates") {
  auto cfg = small_config();
  SUBCASE("zero flux gives zero distance") {
    auto d = coupled_distances(0.3, 20, cfg, additive_models(), 2);
    for (double x : d) CHECK(x == 0.0);
    CHECK(estimate_tail(0.3, 1e-9, 20, cfg, additive_models(), cfg.seed, 2).hits == 0);
  }
  SUBCASE("unreachable threshold") {
    CHECK(estimate_tail(0.5, 100.0, 50, cfg, default_models(), cfg.seed, 2).p_hat == 0.0);
  }
  SUBCASE("monotone in iota and reproducible across workers") {
    std::size_t prev = 1000;
    for (double iota : {0.001, 0.02, 0.05, 0.1, 0.3}) {
      auto e = estimate_tail(0.5, iota, 200, cfg, default_models(), cfg.seed, 1);
      CHECK(e.hits <= prev);
      prev = e.hits;
    }
    auto a = coupled_distances(0.5, 64, cfg, default_models(), 1);
    auto b = coupled_distances(0.5, 64, cfg, default_models(), 8);
    CHECK(a == b);
  }
}

TEST_CASE("exponential-equivalence scan") {
  auto cfg = small_config();
  std::vector<double> ladder{0.5, 0.2, 0.1};
  auto t = exp_equiv_scan(ladder, 0.05, 300, cfg, default_models(), 2);
  REQUIRE(t.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(t.schedule[i].gamma == doctest::Approx(std::sqrt(ladder[i])));
    CHECK(t.schedule[i].p == doctest::Approx(1 / ladder[i]));
  }
  for (std::size_t i = 1; i < 3; ++i) CHECK(t.rows[i].eps_log_p < t.rows[i - 1].eps_log_p);

  auto zero = exp_equiv_scan(ladder, 0.05, 50, cfg, additive_models(), 2);
  for (const auto& r : zero.rows) CHECK(std::isinf(r.eps_log_p));
  CHECK(scan_csv(zero).find("-inf") != std::string::npos);

  std::vector<double> one{0.5};
  auto single = exp_equiv_scan(one, 0.05, 100, cfg, default_models(), 2);
  auto direct = estimate_tail(0.5, 0.05, 100, cfg, default_models(), cfg.seed, 2);
  CHECK(single.rows[0].estimate.hits == direct.hits);

  std::vector<double> bad{0.1, 0.2};
  CHECK_THROWS_AS(exp_equiv_scan(bad, 0.05, 10, cfg, default_models()), PreconditionError);
}

TEST_CASE("kolmogorov-smirnov") {
  CHECK(kolmogorov_q(0.0) == 1.0);
  CHECK(kolmogorov_q(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(kolmogorov_q(1.6276) == doctest::Approx(0.01).epsilon(1e-3));

  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01(0, 1), shifted(0.5, 1);
  std::vector<double> a(2000), b(2000), c(2000);
  for (auto& x : a) x = n01(rng);
  for (auto& x : b) x = n01(rng);
  for (auto& x : c) x = shifted(rng);
  CHECK(ks_two_sample(a, b).p_value > 0.01);
  CHECK(ks_two_sample(a, c).p_value < 1e-6);
  CHECK(ks_two_sample(a, a).statistic == 0.0);

  // rejection rate of the asymptotic test under H0 is close to its level
  int rejects = 0;
  for (int r = 0; r < 200; ++r) {
    std::vector<double> x(300), y(300);
    for (auto& v : x) v = n01(rng);
    for (auto& v : y) v = n01(rng);
    if (ks_two_sample(x, y).p_value < 0.05) ++rejects;
  }
  CHECK(rejects <= 22);
}

TEST_CASE("functionals") {
  TorusGrid g(4);
  ScalarField u(g, {1, -1, 2, 0});
  CHECK(evaluate_functional(Functional::mass, u) == doctest::Approx(0.5));
  CHECK(evaluate_functional(Functional::l2norm, u) == doctest::Approx(std::sqrt(6.0 / 4.0)));
  CHECK(evaluate_functional(Functional::maxval, u) == 2.0);
  CHECK(functional_from_string("l2norm") == Functional::l2norm);
  CHECK_THROWS_WITH_AS(functional_from_string("energy"), doctest::Contains("harness.functionals"), ConfigError);
}

TEST_CASE("scaling in law") {
  auto cfg = small_config();
  std::vector<Functional> fs{Functional::mass, Functional::l2norm};
  SUBCASE("zero noise takes the exact branch") {
    ModelBundle m = default_models();
    m.noise = NoiseModel{};
    m.initial = SineInitial{0.5, 1.0, 1};
    for (const auto& r : scaling_check(0.2, fs, 200, cfg, m, 2)) {
      CHECK(r.exact_branch);
      CHECK(r.max_abs_diff <= 1e-12);
      CHECK(r.pass());
    }
  }
  SUBCASE("additive gaussian laws agree") {
    auto run = [&](std::uint64_t seed) {
      SimConfig c = cfg;
      c.seed = seed;
      return scaling_check(0.2, fs, 2000, c, additive_models(), 2);
    };
    auto res = run(cfg.seed);
    bool ok = true;
    for (const auto& r : res) ok = ok && r.pass();
    if (!ok) res = run(cfg.seed + 1);
    for (const auto& r : res) {
      CHECK_FALSE(r.exact_branch);
      CHECK(r.pass());
    }
  }
  CHECK_THROWS_AS(scaling_check(0.2, fs, 10, cfg, additive_models()), PreconditionError);
}

TEST_CASE("moment scan") {
  auto cfg = small_config();
  std::vector<double> ladder{1.0, 0.1};
  std::vector<double> ps{1.0, 2.0};
  SUBCASE("zero noise constant data") {
    ModelBundle m = default_models();
    m.noise = NoiseModel{};
    m.initial = ConstantInitial{-1.5};
    auto t = moment_scan(ladder, ps, 20, cfg, m, 2);
    for (const auto& r : t.rows) {
      CHECK(r.u_mean == doctest::Approx(std::pow(1.5, r.p)));
      CHECK(r.v_mean == doctest::Approx(std::pow(1.5, r.p)));
    }
  }
  SUBCASE("additive second moment against the Doob bound") {
    auto m = additive_models();
    std::vector<double> p2{2.0};
    std::vector<double> eps{0.5};
    auto t = moment_scan(eps, p2, 400, cfg, m, 2);
    const double eta2 = 0.5;  // ‖sin‖²
    CHECK(t.rows[0].v_mean >= eta2);
    CHECK(t.rows[0].v_mean <= eta2 + 4 * 0.5 + 3 * t.rows[0].v_se);
  }
  SUBCASE("default model ratios") {
    auto t = moment_scan(ladder, ps, 100, cfg, default_models(), 2);
    for (const auto& s : t.sup) {
      CHECK(std::isfinite(s.u_max));
      CHECK(s.u_ratio < 2.0);
      CHECK(s.v_ratio < 2.0);
    }
  }
  std::vector<double> bad{9.0};
  CHECK_THROWS_AS(moment_scan(ladder, bad, 10, cfg, default_models()), PreconditionError);
}

TEST_CASE("worker count from the environment") {
  setenv("SCLAW_THREADS", "3", 1);
  CHECK(default_workers() == 3);
  setenv("SCLAW_THREADS", "0", 1);
  CHECK(default_workers() >= 1);
  unsetenv("SCLAW_THREADS");
}
