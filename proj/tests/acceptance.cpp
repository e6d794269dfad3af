// Runs every acceptance criterion once and prints one PASS/FAIL line each.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "sclaw/bounds.hpp"
#include "sclaw/cli/app.hpp"
#include "sclaw/cli/config.hpp"
#include "sclaw/harness.hpp"
#include "sclaw/initial.hpp"
#include "sclaw/io.hpp"
#include "sclaw/kinetic.hpp"
#include "sclaw/rate.hpp"
#include "sclaw/solvers.hpp"

using namespace sclaw;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

const std::string kDefaultConfig = std::string(SCLAW_CONFIG_DIR) + "/burgers2mode.json";

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

double l1(const ScalarField& a, const ScalarField& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s * a.grid().dx();
}

double positive_part_l1(const ScalarField& u, const ScalarField& v) {
  double s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) s += std::max(u[i] - v[i], 0.0);
  return s * u.grid().dx();
}

ScalarField random_field(std::mt19937_64& rng, const TorusGrid& g) {
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::vector<double> v(g.cells());
  for (auto& x : v) x = d(rng);
  return ScalarField(g, std::move(v));
}

Outcome entropy_shock() {
  const TorusGrid g(400);
  const auto u0 = make_initial(RiemannInitial{1.0, 0.0, 0.5}, g);
  const auto u = evolve_deterministic(u0, FluxModel::burgers(), 1.0, 0.5).back();
  double x = -1;
  for (int i = 0; i + 1 < g.cells(); ++i)
    if (g.center(i) > 0.55 && u[i] >= 0.5 && u[i + 1] < 0.5)
      x = g.center(i) + (u[i] - 0.5) / (u[i] - u[i + 1]) * g.dx();
  const double err = std::fabs(x - 0.75);
  return {err <= 2 * g.dx(), "front at " + fmt(x) + ", |error| = " + fmt(err) + " (limit " + fmt(2 * g.dx()) + ")"};
}

Outcome l1_contraction() {
  const TorusGrid g(64);
  const auto flux = FluxModel::burgers();
  std::mt19937_64 rng(2024);
  std::size_t violations = 0, steps = 0;
  for (int pair = 0; pair < 100; ++pair) {
    auto a = random_field(rng, g), b = random_field(rng, g);
    double t = 0, prev = l1(a, b);
    while (t < 0.5) {
      const std::vector<const ScalarField*> both{&a, &b};
      const double dt = std::min(stable_dt(both, flux, 1.0, 0.45), 0.5 - t);
      a = deterministic_step(a, flux, 1.0, dt);
      b = deterministic_step(b, flux, 1.0, dt);
      t += dt;
      const double d = l1(a, b);
      violations += d > prev + 1e-10;
      prev = d;
      ++steps;
    }
  }
  return {violations == 0, std::to_string(violations) + " violations over " + std::to_string(steps) + " steps"};
}

Outcome bracket() {
  const TorusGrid g(64);
  std::mt19937_64 rng(7);
  double worst = 0;
  for (int pair = 0; pair < 100; ++pair) {
    const auto u = random_field(rng, g), v = random_field(rng, g);
    const auto b = bracket_identity(u, v, 1e-3);
    worst = std::max({worst, std::fabs(b.plus - positive_part_l1(u, v)), std::fabs(b.minus - positive_part_l1(v, u))});
  }
  return {worst <= 2e-3, "max deviation " + fmt(worst) + " (limit 0.002)"};
}

Outcome mollifier_bound() {
  std::mt19937_64 rng(11);
  const MollifierPair m(0.1, 0.05);
  std::size_t violations = 0;
  double worst_h2 = 0;
  for (int pair = 0; pair < 100; ++pair) {
    const TorusGrid g(64);
    const auto s = error_split(random_field(rng, g), random_field(rng, g), m);
    worst_h2 = std::max(worst_h2, std::fabs(s.H2));
    violations += std::fabs(s.H2) > 4 * m.delta();
  }
  double worst_bf = 0;
  const TorusGrid g16(16);
  for (int pair = 0; pair < 20; ++pair) {
    const auto u = random_field(rng, g16), v = random_field(rng, g16);
    worst_bf = std::max(worst_bf, std::fabs(doubling_functional(u, v, m) - doubling_functional_bruteforce(u, v, m)));
  }
  return {violations == 0 && worst_bf <= 1e-6, std::to_string(violations) + " |H2| > 4 delta (max |H2| " +
                                                   fmt(worst_h2) + "); closed form vs quadrature " + fmt(worst_bf)};
}

struct PathwiseRun {
  std::vector<JReports> j;
  std::vector<BoundReport> i;
};

PathwiseRun pathwise_checks() {
  const auto cfg = cli::load_config(kDefaultConfig);
  const auto models = cfg.models();
  SimConfig sim = cfg.sim;
  sim.epsilon = 0.1;
  const MollifierPair moll(0.1, 0.1);
  const auto eta = make_initial(models.initial, TorusGrid(sim.cells));
  PathwiseRun r;
  r.j.resize(50);
  r.i.resize(50);
  parallel_for(50, default_workers(), [&](std::size_t p) {
    const auto [u, v] = coupled_pair(eta, sim, models.flux, models.noise, static_cast<std::uint32_t>(p));
    r.j[p] = bound_check_J(u, v, moll, sim.epsilon, models.noise, static_cast<std::int64_t>(p));
    r.i[p] = bound_check_I(u, v, moll, sim.epsilon, models.flux, static_cast<std::int64_t>(p));
  });
  return r;
}

Outcome j_certificates(const PathwiseRun& r) {
  std::size_t violations = 0;
  double w1 = 0, w2 = 0;
  for (const auto& j : r.j) {
    violations += !j.j1.pass + !j.j2.pass;
    if (j.j1.rhs > 0) w1 = std::max(w1, j.j1.lhs / j.j1.rhs);
    if (j.j2.rhs > 0) w2 = std::max(w2, j.j2.lhs / j.j2.rhs);
  }
  return {violations == 0, std::to_string(violations) + " violations on 50 paths; worst lhs/rhs J1 " + fmt(w1) +
                               ", J2 " + fmt(w2)};
}

Outcome i_certificate(const PathwiseRun& r) {
  std::size_t violations = 0;
  double w = 0;
  for (const auto& i : r.i) {
    violations += !i.pass;
    if (i.rhs > 0) w = std::max(w, i.lhs / i.rhs);
  }
  const bool envelope = validate_gamma_envelope(2.0, 0.1).pass;
  return {violations == 0 && envelope, std::to_string(violations) + " violations on 50 paths; worst lhs/rhs " + fmt(w) +
                                           "; envelope " + (envelope ? "validated" : "FAILED")};
}

Outcome scaling() {
  const auto cfg = cli::load_config(kDefaultConfig);
  SimConfig sim = cfg.sim;
  std::vector<Functional> fs{Functional::mass, Functional::l2norm};

  ModelBundle frozen = cfg.models();
  frozen.noise = NoiseModel{};
  frozen.initial = SineInitial{0.5, 1.0, 1};
  double exact_diff = 0;
  bool exact_ok = true;
  for (const auto& r : scaling_check(0.1, fs, 200, sim, frozen)) {
    exact_ok = exact_ok && r.exact_branch && r.pass();
    exact_diff = std::max(exact_diff, r.max_abs_diff);
  }

  ModelBundle additive;
  additive.flux = FluxModel::zero();
  additive.noise = NoiseModel({{1.0, Profile::constant, 1, 1.0, 0.0}});
  additive.initial = SineInitial{0.0, 1.0, 1};
  auto attempt = [&](std::uint64_t seed, std::string& detail) {
    SimConfig s = sim;
    s.seed = seed;
    bool ok = true;
    detail.clear();
    for (const auto& r : scaling_check(0.1, fs, 2000, s, additive)) {
      ok = ok && !r.exact_branch && r.pass();
      detail += " " + to_string(r.functional) + " p=" + fmt(r.ks.p_value);
    }
    return ok;
  };
  std::string detail;
  bool ks_ok = attempt(sim.seed, detail);
  if (!ks_ok) {
    std::string first = detail;
    ks_ok = attempt(sim.seed + 1, detail);
    detail = first + "; rerun:" + detail;
  }
  return {exact_ok && ks_ok, "exact branch diff " + fmt(exact_diff) + ";" + detail};
}

Outcome exp_equivalence() {
  const auto cfg = cli::load_config(kDefaultConfig);
  const std::vector<double> ladder{0.5, 0.2, 0.1, 0.05};
  const auto t = exp_equiv_scan(ladder, 0.05, 5000, cfg.sim, cfg.models());
  bool ok = true;
  std::string detail = "eps*log p:";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    ok = ok && r.estimate.hits > 0 && (i == 0 || r.eps_log_p < t.rows[i - 1].eps_log_p);
    detail += " " + fmt(r.eps_log_p) + " (" + std::to_string(r.estimate.hits) + ")";
  }
  return {ok, detail};
}

Outcome rate_oracle() {
  const TorusGrid g(16);
  const auto eta = ScalarField::constant(g, 0.0);
  const NoiseModel additive({{1.0, Profile::constant, 1, 1.0, 0.0}});
  Trajectory target(g);
  for (int n = 0; n <= 100; ++n) target.append(n / 100.0, ScalarField::constant(g, 0.7 * n / 100.0));
  const auto r = rate_estimate(target, 1, 16, RateOptions{}, additive, eta);

  double oracle = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 2000; ++k) {
    const auto h = Control::constant(1, 1, k * 1e-3);
    if (skeleton_residual(h, target, additive, eta) <= 1e-6) oracle = std::min(oracle, action(h));
  }
  const NoiseModel silent({{0.0, Profile::constant, 1, 1.0, 0.0}});
  const auto none = rate_estimate(target, 1, 16, RateOptions{}, silent, eta);
  const bool ok = r.feasible && std::fabs(r.I_hat - 0.245) <= 1e-3 && std::fabs(oracle - 0.245) <= 1e-3 &&
                  !none.feasible && std::isinf(none.I_hat);
  return {ok, "I_hat " + fmt(r.I_hat) + " (residual " + fmt(r.residual) + "), grid-search oracle " + fmt(oracle) +
                  ", infeasible case I_hat " + fmt(none.I_hat)};
}

Outcome moments() {
  const auto cfg = cli::load_config(kDefaultConfig);
  const std::vector<double> ladder{1.0, 0.5, 0.1}, p{2.0};
  const auto t = moment_scan(ladder, p, 500, cfg.sim, cfg.models());
  bool finite = true;
  for (const auto& r : t.rows) finite = finite && std::isfinite(r.u_mean) && std::isfinite(r.v_mean);
  const auto& s = t.sup.front();
  return {finite && s.u_ratio < 2 && s.v_ratio < 2,
          "max/min ratio u " + fmt(s.u_ratio) + ", v " + fmt(s.v_ratio)};
}

Outcome determinism() {
  const auto root = fs::temp_directory_path() / ("sclaw_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  auto scan = [&](const std::string& threads) {
    setenv("SCLAW_THREADS", threads.c_str(), 1);
    const auto dir = root / ("threads_" + threads);
    const std::string out = dir.string();
    const char* argv[] = {"sclaw", "scan", "--config", kDefaultConfig.c_str(), "--out", out.c_str(), "--quiet"};
    const int code = cli::run(7, argv);
    unsetenv("SCLAW_THREADS");
    return std::make_pair(code, dir);
  };
  const auto [c1, d1] = scan("1");
  const auto [c8, d8] = scan("8");
  if (c1 != 0 || c8 != 0) return {false, "scan exited with " + std::to_string(c1) + "/" + std::to_string(c8)};
  const auto m1 = nlohmann::json::parse(read_text_file(d1 / "manifest.json"));
  const auto m8 = nlohmann::json::parse(read_text_file(d8 / "manifest.json"));
  std::size_t identical = 0, files = 0;
  for (const auto& f : m1["files"]) {
    ++files;
    const std::string name = f["name"];
    identical += fs::exists(d8 / name) && read_text_file(d1 / name) == read_text_file(d8 / name);
  }
  const bool ok = m1["files"] == m8["files"] && identical == files && files > 0;
  fs::remove_all(root);
  return {ok, std::to_string(identical) + "/" + std::to_string(files) + " files byte-identical, manifest hashes " +
                  (m1["files"] == m8["files"] ? "equal" : "DIFFER")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<Outcome()> run;
  };
  PathwiseRun pathwise;
  double pathwise_seconds = 0;
  const std::vector<Criterion> criteria{
      {1, "entropy shock speed", 1, entropy_shock},
      {2, "L1 contraction", 30, l1_contraction},
      {3, "bracket identity", 10, bracket},
      {4, "mollifier bound and doubling quadrature", 60, mollifier_bound},
      {5, "pathwise J certificates", 180,
       [&] {
         const auto t0 = std::chrono::steady_clock::now();
         pathwise = pathwise_checks();
         pathwise_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
         return j_certificates(pathwise);
       }},
      {6, "I certificate", 180, [&] { return i_certificate(pathwise); }},
      {7, "scaling in law", 120, scaling},
      {8, "exponential-equivalence trend", 300, exp_equivalence},
      {9, "rate function oracle", 60, rate_oracle},
      {10, "uniform moments", 120, moments},
      {11, "thread-count determinism", 300, determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.id == 6) secs += pathwise_seconds;  // shares the simulation of criterion 5
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.name << ": " << o.detail << " ("
              << fmt(secs) << " s" << (in_time ? "" : ", over the " + fmt(c.budget_s) + " s budget") << ")"
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria pass" << std::endl;
  return failed == 0 ? 0 : 1;
}
