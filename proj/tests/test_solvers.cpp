#include <doctest.h>

#include <cmath>
#include <vector>

#include "sclaw/errors.hpp"
#include "sclaw/harness.hpp"
#include "sclaw/initial.hpp"
#include "sclaw/rng.hpp"
#include "sclaw/solvers.hpp"

using namespace sclaw;

namespace {

NoiseModel additive(double sigma = 1.0) { return NoiseModel({{sigma, Profile::constant, 1, 1.0, 0.0}}); }

NoiseModel default_noise() {
  return NoiseModel({{0.1, Profile::constant, 1, 1.0, 0.0}, {1.0, Profile::cosine, 1, 1.0, 0.0}});
}

double l1(const ScalarField& a, const ScalarField& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s * a.grid().dx();
}

bool same(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.times()[i] != b.times()[i] || !(a.fields()[i] == b.fields()[i])) return false;
  return true;
}

// Shock location of a smeared 1 -> 0 front: x where the profile crosses 1/2 between lo and hi.
double front_position(const ScalarField& u, double lo, double hi) {
  const auto& g = u.grid();
  for (int i = 0; i + 1 < g.cells(); ++i) {
    const double a = g.center(i), b = g.center(i + 1);
    if (a < lo || b > hi) continue;
    if (u[i] >= 0.5 && u[i + 1] < 0.5) return a + (u[i] - 0.5) / (u[i] - u[i + 1]) * (b - a);
  }
  return -1.0;
}

}  // namespace

TEST_CASE("engquist-osher flux values") {
  auto b = FluxModel::burgers();
  for (double c : {-2.0, -0.3, 0.0, 0.7, 3.0}) CHECK(eo_flux(c, c, b) == doctest::Approx(c * c / 2));
  CHECK(eo_flux(1.0, -1.0, b) == doctest::Approx(1.0));
  auto lin = FluxModel::linear(2.0);
  CHECK(eo_flux(0.3, -5.0, lin) == doctest::Approx(0.6));
  auto neg = FluxModel::linear(-1.5);
  CHECK(eo_flux(0.3, -2.0, neg) == doctest::Approx(3.0));
  // cubic with sign changes of a: consistency F(c,c) = A(c)
  auto cubic = FluxModel::polynomial({0, -1, 0, 1.0 / 3.0}, 3.0, 2.0);
  for (double c : {-2.0, -0.5, 0.5, 2.0}) CHECK(eo_flux(c, c, cubic) == doctest::Approx(cubic.flux(c)));
}

TEST_CASE("deterministic step: constant fields, conservation, CFL") {
  TorusGrid g(50);
  auto flux = FluxModel::burgers();
  auto c = ScalarField::constant(g, 1.3);
  CHECK(deterministic_step(c, flux, 1.0, 0.01) == c);

  auto s = make_initial(SineInitial{0.4, 1.0, 2}, g);
  auto out = deterministic_step(s, flux, 1.0, 0.01);
  CHECK(std::fabs(out.mean() - s.mean()) <= 1e-12 * (1 + std::fabs(s.mean())));

  CHECK_THROWS_WITH_AS(deterministic_step(s, flux, 1.0, 0.5), doctest::Contains("CFL"), NumericalFailure);
  CHECK(courant_number(s, flux, 1.0, 0.01) == doctest::Approx(1.4 * 0.01 * 50).epsilon(1e-2));
}

TEST_CASE("sub-cycled flux substep keeps large dt stable") {
  TorusGrid g(64);
  auto s = make_initial(SineInitial{0.0, 2.0, 1}, g);
  auto out = flux_substep(s, FluxModel::burgers(), 1.0, 0.2, 0.45);
  CHECK(out.max() <= s.max() + 1e-12);
  CHECK(out.min() >= s.min() - 1e-12);
}

TEST_CASE("riemann shock speed") {
  TorusGrid g(400);
  auto u0 = make_initial(RiemannInitial{1.0, 0.0, 0.25}, g);
  auto tr = evolve_deterministic(u0, FluxModel::burgers(), 1.0, 0.5);
  CHECK(tr.horizon() == doctest::Approx(0.5).epsilon(1e-14));
  const double x = front_position(tr.back(), 0.3, 0.9);
  CHECK(std::fabs(x - (0.25 + 0.25)) <= 2 * g.dx());
}

TEST_CASE("L1 contraction of the monotone scheme") {
  TorusGrid g(80);
  auto flux = FluxModel::burgers();
  auto a = make_initial(SineInitial{0.2, 1.0, 1}, g);
  auto b = make_initial(RiemannInitial{1.5, -0.5, 0.3}, g);
  const std::vector<const ScalarField*> both{&a, &b};
  const double dt = stable_dt(both, flux, 1.0, 0.45);
  double prev = l1(a, b);
  for (int n = 0; n < 60; ++n) {
    a = deterministic_step(a, flux, 1.0, dt);
    b = deterministic_step(b, flux, 1.0, dt);
    const double d = l1(a, b);
    CHECK(d <= prev + 1e-10);
    prev = d;
  }
}

TEST_CASE("stochastic substep") {
  TorusGrid g(8);
  auto eta = make_initial(SineInitial{0.0, 1.0, 1}, g);
  const std::vector<double> inc{0.3};
  CHECK(stochastic_substep(eta, additive(), 0.0, inc) == eta);
  auto out = stochastic_substep(eta, additive(), 1.0, inc);
  for (int i = 0; i < 8; ++i) CHECK(out[i] == doctest::Approx(eta[i] + 0.3).epsilon(1e-15));

  // zero-mean increments leave the mean update unbiased
  NoiseModel mult({{1.0, Profile::cosine, 1, 1.0, 0.5}});
  NoisePath p(11, Stream::primary, 0, 0.01);
  const int n = 100000;
  std::vector<double> sum(8, 0.0), sum2(8, 0.0);
  for (int s = 0; s < n; ++s) {
    const double d = p.increment(static_cast<std::uint32_t>(s), 0);
    auto o = stochastic_substep(eta, mult, 1.0, std::vector<double>{d});
    for (int i = 0; i < 8; ++i) {
      sum[i] += o[i];
      sum2[i] += o[i] * o[i];
    }
  }
  for (int i = 0; i < 8; ++i) {
    const double m = sum[i] / n;
    const double se = std::sqrt(std::max(sum2[i] / n - m * m, 1e-300) / n);
    CHECK(std::fabs(m - eta[i]) <= 3 * se + 1e-15);
  }
}

TEST_CASE("scaled SPDE degenerate cases") {
  SimConfig cfg;
  cfg.epsilon = 0.3;
  cfg.cells = 32;
  TorusGrid g(cfg.cells);
  auto eta = make_initial(SineInitial{0.5, 1.0, 1}, g);

  SUBCASE("zero noise equals deterministic evolution with scale epsilon") {
    auto tr = solve_scaled_spde(eta, cfg, FluxModel::burgers(), NoiseModel{}, 0);
    ScalarField u = eta;
    const double dt = cfg.step_size();
    for (int n = 0; n < cfg.steps(); ++n) u = flux_substep(u, FluxModel::burgers(), cfg.epsilon, dt, cfg.cfl);
    CHECK(tr.back() == u);
    CHECK(tr.size() == static_cast<std::size_t>(cfg.steps() + 1));
  }
  SUBCASE("zero flux equals flux-free bitwise") {
    auto a = solve_scaled_spde(eta, cfg, FluxModel::zero(), default_noise(), 5);
    auto b = solve_flux_free(eta, cfg, default_noise(), 5);
    CHECK(same(a, b));
  }
  SUBCASE("repeat is bitwise identical") {
    auto a = solve_scaled_spde(eta, cfg, FluxModel::burgers(), default_noise(), 9);
    auto b = solve_scaled_spde(eta, cfg, FluxModel::burgers(), default_noise(), 9);
    CHECK(same(a, b));
    auto c = solve_scaled_spde(eta, cfg, FluxModel::burgers(), default_noise(), 10);
    CHECK_FALSE(same(a, c));
  }
  SUBCASE("strang and lie approach each other as dt shrinks") {
    // paths differ between dt levels, so compare path averages at the ends of the ladder
    auto gap = [&](double dt) {
      double total = 0;
      for (std::uint32_t p = 0; p < 8; ++p) {
        SimConfig c = cfg;
        c.dt = dt;
        c.epsilon = 1.0;
        const auto lie = solve_scaled_spde(eta, c, FluxModel::burgers(), additive(0.5), p).back();
        c.splitting = Splitting::strang;
        const auto strang = solve_scaled_spde(eta, c, FluxModel::burgers(), additive(0.5), p).back();
        total += l1(lie, strang);
      }
      return total;
    };
    const double coarse = gap(0.04), mid = gap(0.01), fine = gap(0.0025);
    CHECK(mid < coarse);
    CHECK(fine < mid);
  }
}

TEST_CASE("additive flux-free equation integrates exactly") {
  SimConfig cfg;
  cfg.epsilon = 0.2;
  cfg.cells = 16;
  TorusGrid g(cfg.cells);
  auto eta = make_initial(SineInitial{0.0, 1.0, 1}, g);
  auto tr = solve_flux_free(eta, cfg, additive(), 3);
  NoisePath p(cfg.seed, Stream::primary, 3, cfg.step_size());
  double beta = 0;
  for (std::size_t n = 0; n < tr.size(); ++n) {
    for (int i = 0; i < g.cells(); ++i)
      CHECK(tr.fields()[n][i] == doctest::Approx(eta[i] + std::sqrt(cfg.epsilon) * beta).epsilon(1e-12));
    if (n + 1 < tr.size()) beta += p.increment(static_cast<std::uint32_t>(n), 0);
  }
  auto frozen = solve_flux_free(eta, cfg, NoiseModel{}, 3);
  for (const auto& f : frozen.fields()) CHECK(f == eta);
}

TEST_CASE("coupled pair") {
  SimConfig cfg;
  cfg.cells = 32;
  TorusGrid g(cfg.cells);
  auto eta = make_initial(SineInitial{0.0, 1.0, 1}, g);
  SUBCASE("zero flux gives identical trajectories") {
    auto [u, v] = coupled_pair(eta, cfg, FluxModel::zero(), default_noise(), 2);
    CHECK(same(u, v));
  }
  SUBCASE("epsilon = 0 reduces to deterministic comparison") {
    cfg.epsilon = 0.0;
    auto [u, v] = coupled_pair(eta, cfg, FluxModel::burgers(), default_noise(), 2);
    for (const auto& f : v.fields()) CHECK(f == eta);
    CHECK(l1l1_distance(u, v) == 0.0);  // scale ε = 0 freezes the flux too
  }
  SUBCASE("distance is stable under save stride refinement") {
    cfg.epsilon = 0.5;
    auto [u1, v1] = coupled_pair(eta, cfg, FluxModel::burgers(), default_noise(), 4);
    cfg.save_stride = 5;
    auto [u5, v5] = coupled_pair(eta, cfg, FluxModel::burgers(), default_noise(), 4);
    CHECK(u5.size() == 21);
    CHECK(std::fabs(l1l1_distance(u1, v1) - l1l1_distance(u5, v5)) <= 1e-3);
  }
  SUBCASE("observer sees pre-step states in order") {
    int calls = 0;
    double last_t = -1;
    coupled_pair(eta, cfg, FluxModel::burgers(), default_noise(), 0,
                 [&](int step, double t, double dt, const ScalarField& u, const ScalarField&, std::span<const double> inc) {
                   CHECK(step == calls);
                   CHECK(t > last_t);
                   CHECK(dt == doctest::Approx(0.01));
                   CHECK(inc.size() == 2);
                   if (step == 0) CHECK(u == eta);
                   last_t = t;
                   ++calls;
                 });
    CHECK(calls == cfg.steps());
  }
}

TEST_CASE("base small-time solve maps onto the scaled grid") {
  SimConfig cfg;
  cfg.cells = 32;
  TorusGrid g(cfg.cells);
  auto eta = make_initial(SineInitial{0.3, 1.0, 1}, g);
  SUBCASE("zero noise") {
    cfg.epsilon = 0.25;
    auto base = solve_base_small_time(eta, cfg.epsilon, cfg, FluxModel::burgers(), NoiseModel{}, 0);
    auto scaled = solve_scaled_spde(eta, cfg, FluxModel::burgers(), NoiseModel{}, 0).back();
    for (int i = 0; i < g.cells(); ++i) CHECK(base[i] == doctest::Approx(scaled[i]).epsilon(1e-13));
  }
  SUBCASE("epsilon = 1 matches the scaled endpoint") {
    cfg.epsilon = 1.0;
    auto base = solve_base_small_time(eta, 1.0, cfg, FluxModel::burgers(), default_noise(), 6);
    auto scaled = solve_scaled_spde(eta, cfg, FluxModel::burgers(), default_noise(), 6).back();
    CHECK(base == scaled);
  }
  SUBCASE("additive variance equals epsilon") {
    const double eps = 0.2;
    const int n = 4000;
    double s = 0, s2 = 0;
    for (int p = 0; p < n; ++p) {
      auto e = solve_base_small_time(eta, eps, cfg, FluxModel::zero(), additive(), static_cast<std::uint32_t>(p));
      const double d = e[0] - eta[0];
      s += d;
      s2 += d * d;
    }
    const double var = s2 / n - (s / n) * (s / n);
    CHECK(var == doctest::Approx(eps).epsilon(0.1));
  }
}

TEST_CASE("skeleton ODE") {
  TorusGrid g(8);
  auto eta = make_initial(SineInitial{1.0, 0.5, 1}, g);
  auto zero = solve_skeleton(eta, Control(1, 4), additive(), 100);
  for (const auto& f : zero.fields()) CHECK(f == eta);

  auto lin = solve_skeleton(eta, Control::constant(1, 4, 0.7), additive(), 100);
  for (std::size_t n = 0; n < lin.size(); ++n)
    for (int i = 0; i < 8; ++i) CHECK(lin.fields()[n][i] == doctest::Approx(eta[i] + 0.7 * lin.times()[n]).epsilon(1e-13));

  NoiseModel identity({{1.0, Profile::constant, 1, 0.0, 1.0}});
  auto ex = solve_skeleton(eta, Control::constant(1, 4, 0.8), identity, 100);
  for (int i = 0; i < 8; ++i) CHECK(std::fabs(ex.back()[i] - eta[i] * std::exp(0.8)) <= 1e-8);

  // fourth-order convergence
  double prev = 0;
  for (int steps : {8, 16, 32}) {
    auto tr = solve_skeleton(eta, Control::constant(1, 4, 1.5), identity, steps);
    const double err = std::fabs(tr.back()[0] - eta[0] * std::exp(1.5));
    if (prev > 0) CHECK(prev / err == doctest::Approx(16.0).epsilon(0.1));
    prev = err;
  }
  CHECK_THROWS_AS(solve_skeleton(eta, Control(1, 4), additive(), 2), PreconditionError);
}

TEST_CASE("lp moments") {
  TorusGrid g(10);
  Trajectory c(g);
  c.append(0, ScalarField::constant(g, -1.5));
  c.append(1, ScalarField::constant(g, -1.5));
  CHECK(lp_moment(c, 2.0) == doctest::Approx(2.25));

  Trajectory r(g);
  r.append(0, make_initial(RiemannInitial{1.0, 0.0, 0.5}, g));
  CHECK(lp_moment(r, 1.0) == doctest::Approx(0.5));

  SimConfig cfg;
  cfg.cells = 16;
  auto eta = make_initial(SineInitial{0.0, 1.0, 1}, TorusGrid(16));
  auto fine = solve_flux_free(eta, cfg, default_noise(), 1);
  cfg.save_stride = 10;
  auto coarse = solve_flux_free(eta, cfg, default_noise(), 1);
  CHECK(lp_moment(fine, 2.0) >= lp_moment(coarse, 2.0));
}
