#include "sclaw/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "sclaw/errors.hpp"
#include "sclaw/io.hpp"
#include "sclaw/numerics.hpp"
#include "sclaw/solvers.hpp"

namespace sclaw {

namespace {
constexpr double kZ95 = 1.959963984540054;
}

MCEstimate wilson_estimate(std::size_t hits, std::size_t n) {
  if (n == 0) throw PreconditionError("Monte Carlo estimate needs n >= 1");
  if (hits > n) throw PreconditionError("hit count exceeds sample size");
  MCEstimate e;
  e.n = n;
  e.hits = hits;
  const double nn = static_cast<double>(n);
  e.p_hat = static_cast<double>(hits) / nn;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / nn;
  const double centre = (e.p_hat + z2 / (2.0 * nn)) / denom;
  const double half = kZ95 / denom * std::sqrt(e.p_hat * (1.0 - e.p_hat) / nn + z2 / (4.0 * nn * nn));
  e.ci_lo = std::clamp(std::min(centre - half, e.p_hat), 0.0, 1.0);
  e.ci_hi = std::clamp(std::max(centre + half, e.p_hat), 0.0, 1.0);
  if (hits == 0) e.ci_lo = 0.0;
  if (hits == n) e.ci_hi = 1.0;
  return e;
}

double l1l1_distance(const Trajectory& a, const Trajectory& b) {
  if (!(a.grid() == b.grid())) throw PreconditionError("l1l1_distance: trajectories live on different grids");
  if (a.size() != b.size()) throw PreconditionError("l1l1_distance: trajectories need a shared time grid");
  for (std::size_t n = 0; n < a.size(); ++n)
    if (a.times()[n] != b.times()[n]) throw PreconditionError("l1l1_distance: trajectories need a shared time grid");
  const double dx = a.grid().dx();
  std::vector<double> spatial(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) {
    NeumaierSum s;
    const auto fa = a.fields()[n].values(), fb = b.fields()[n].values();
    for (std::size_t i = 0; i < fa.size(); ++i) s += std::fabs(fa[i] - fb[i]) * dx;
    spatial[n] = s.value();
  }
  NeumaierSum total;
  for (std::size_t n = 0; n + 1 < a.size(); ++n)
    total += 0.5 * (a.times()[n + 1] - a.times()[n]) * (spatial[n] + spatial[n + 1]);
  return total.value();
}

int default_workers() {
  if (const char* env = std::getenv("SCLAW_THREADS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
  if (workers <= 0) workers = default_workers();
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_index = std::numeric_limits<std::size_t>::max();
  std::exception_ptr failure;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> coupled_distances(double epsilon, std::size_t n, SimConfig cfg, const ModelBundle& models,
                                      int workers) {
  cfg.epsilon = epsilon;
  cfg.validate();
  const auto eta = make_initial(models.initial, TorusGrid(cfg.cells));
  std::vector<double> dist(n);
  parallel_for(n, workers, [&](std::size_t i) {
    const auto [u, v] = coupled_pair(eta, cfg, models.flux, models.noise, static_cast<std::uint32_t>(i));
    dist[i] = l1l1_distance(u, v);
  });
  return dist;
}

MCEstimate estimate_tail(double epsilon, double iota, std::size_t n, SimConfig cfg, const ModelBundle& models,
                         std::uint64_t base_seed, int workers) {
  if (n < 1) throw PreconditionError("estimate_tail: n must be >= 1");
  if (!(iota > 0.0)) throw PreconditionError("estimate_tail: iota must be positive");
  cfg.seed = base_seed;
  const auto dist = coupled_distances(epsilon, n, cfg, models, workers);
  std::size_t hits = 0;
  for (double d : dist) hits += d > iota;
  return wilson_estimate(hits, n);
}

ScanTable exp_equiv_scan(std::span<const double> ladder, double iota, std::size_t n, const SimConfig& cfg,
                         const ModelBundle& models, int workers) {
  if (ladder.empty()) throw PreconditionError("exp_equiv_scan: empty ladder");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (!(ladder[i] < ladder[i - 1])) throw PreconditionError("exp_equiv_scan: ladder must be sorted descending");
  ScanTable table;
  for (double eps : ladder) {
    ScanRow row;
    row.epsilon = eps;
    row.iota = iota;
    row.estimate = estimate_tail(eps, iota, n, cfg, models, cfg.seed, workers);
    row.eps_log_p = row.estimate.hits == 0 ? -std::numeric_limits<double>::infinity()
                                           : eps * std::log(row.estimate.p_hat);
    table.rows.push_back(row);
    table.schedule.push_back({eps, std::sqrt(eps), std::sqrt(eps), 1.0 / eps});
  }
  return table;
}

std::string scan_csv(const ScanTable& table) {
  std::string out = "epsilon,iota,n,hits,p_hat,ci_lo,ci_hi,eps_log_p\n";
  for (const auto& r : table.rows)
    out += format_double(r.epsilon) + "," + format_double(r.iota) + "," + std::to_string(r.estimate.n) + "," +
           std::to_string(r.estimate.hits) + "," + format_double(r.estimate.p_hat) + "," +
           format_double(r.estimate.ci_lo) + "," + format_double(r.estimate.ci_hi) + "," +
           format_double(r.eps_log_p) + "\n";
  return out;
}

std::string schedule_csv(const ScanTable& table) {
  std::string out = "epsilon,gamma,delta,p\n";
  for (const auto& r : table.schedule)
    out += format_double(r.epsilon) + "," + format_double(r.gamma) + "," + format_double(r.delta) + "," +
           format_double(r.p) + "\n";
  return out;
}

double kolmogorov_q(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::fabs(term) <= 1e-12 * std::fabs(sum) || std::fabs(term) <= 1e-300)
      return std::clamp(2.0 * sum, 0.0, 1.0);
    sign = -sign;
  }
  return 1.0;
}

KSResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw PreconditionError("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  KSResult r;
  r.statistic = d;
  const double ne = std::sqrt(na * nb / (na + nb));
  r.p_value = kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

std::string to_string(Functional f) {
  switch (f) {
    case Functional::mass: return "mass";
    case Functional::l2norm: return "l2norm";
    case Functional::maxval: return "maxval";
  }
  return "mass";
}

Functional functional_from_string(const std::string& name) {
  if (name == "mass") return Functional::mass;
  if (name == "l2norm") return Functional::l2norm;
  if (name == "maxval") return Functional::maxval;
  throw ConfigError("invalid value for key: harness.functionals (" + name + ")");
}

double evaluate_functional(Functional f, const ScalarField& u) {
  const double dx = u.grid().dx();
  switch (f) {
    case Functional::mass: {
      NeumaierSum s;
      for (double v : u.values()) s += v * dx;
      return s.value();
    }
    case Functional::l2norm: {
      NeumaierSum s;
      for (double v : u.values()) s += v * v * dx;
      return std::sqrt(s.value());
    }
    case Functional::maxval: return u.max();
  }
  return 0.0;
}

std::vector<ScalingResult> scaling_check(double epsilon, std::span<const Functional> functionals, std::size_t n,
                                         const SimConfig& cfg, const ModelBundle& models, int workers) {
  if (n < 200) throw PreconditionError("scaling_check: need n >= 200 per sample");
  SimConfig scaled = cfg;
  scaled.epsilon = epsilon;
  scaled.validate();
  const auto eta = make_initial(models.initial, TorusGrid(cfg.cells));
  const std::size_t F = functionals.size();
  std::vector<double> A(n * F), B(n * F);
  parallel_for(n, workers, [&](std::size_t i) {
    const auto p = static_cast<std::uint32_t>(i);
    const auto base = solve_base_small_time(eta, epsilon, scaled, models.flux, models.noise, p, Stream::scaling_base);
    const auto sc = solve_scaled_spde(eta, scaled, models.flux, models.noise, p, Stream::scaling_scaled).back();
    for (std::size_t f = 0; f < F; ++f) {
      A[f * n + i] = evaluate_functional(functionals[f], base);
      B[f * n + i] = evaluate_functional(functionals[f], sc);
    }
  });
  std::vector<ScalingResult> out;
  for (std::size_t f = 0; f < F; ++f) {
    ScalingResult r;
    r.functional = functionals[f];
    std::span<const double> a(A.data() + f * n, n), b(B.data() + f * n, n);
    const bool flat_a = std::all_of(a.begin(), a.end(), [&](double x) { return x == a[0]; });
    const bool flat_b = std::all_of(b.begin(), b.end(), [&](double x) { return x == b[0]; });
    for (std::size_t i = 0; i < n; ++i) r.max_abs_diff = std::max(r.max_abs_diff, std::fabs(a[i] - b[i]));
    if (flat_a && flat_b) {
      r.exact_branch = true;
      r.ks.statistic = r.max_abs_diff;
      r.ks.p_value = r.max_abs_diff <= 1e-12 ? 1.0 : 0.0;
    } else {
      r.ks = ks_two_sample(a, b);
    }
    out.push_back(r);
  }
  return out;
}

std::string scaling_csv(std::span<const ScalingResult> results, double epsilon, std::size_t n) {
  std::string out = "functional,epsilon,n,branch,statistic,p_value,max_abs_diff,pass\n";
  for (const auto& r : results)
    out += to_string(r.functional) + "," + format_double(epsilon) + "," + std::to_string(n) + "," +
           (r.exact_branch ? "exact" : "ks") + "," + format_double(r.ks.statistic) + "," +
           format_double(r.ks.p_value) + "," + format_double(r.max_abs_diff) + "," + (r.pass() ? "true" : "false") +
           "\n";
  return out;
}

MomentTable moment_scan(std::span<const double> ladder, std::span<const double> p_list, std::size_t n,
                        const SimConfig& cfg, const ModelBundle& models, int workers) {
  if (ladder.empty() || p_list.empty()) throw PreconditionError("moment_scan: empty ladder or p list");
  if (n < 2) throw PreconditionError("moment_scan: need n >= 2");
  for (double p : p_list)
    if (!(p >= 1.0 && p <= 8.0)) throw PreconditionError("moment_scan: p must lie in [1, 8]");
  const auto eta = make_initial(models.initial, TorusGrid(cfg.cells));
  const std::size_t P = p_list.size();
  MomentTable table;
  for (double eps : ladder) {
    SimConfig c = cfg;
    c.epsilon = eps;
    c.validate();
    std::vector<double> mu(n * P), mv(n * P);
    parallel_for(n, workers, [&](std::size_t i) {
      const auto [u, v] = coupled_pair(eta, c, models.flux, models.noise, static_cast<std::uint32_t>(i));
      for (std::size_t k = 0; k < P; ++k) {
        mu[k * n + i] = lp_moment(u, p_list[k]);
        mv[k * n + i] = lp_moment(v, p_list[k]);
      }
    });
    for (std::size_t k = 0; k < P; ++k) {
      auto stats = [&](const std::vector<double>& xs) {
        NeumaierSum s;
        for (std::size_t i = 0; i < n; ++i) s += xs[k * n + i];
        const double mean = s.value() / n;
        NeumaierSum q;
        for (std::size_t i = 0; i < n; ++i) q += (xs[k * n + i] - mean) * (xs[k * n + i] - mean);
        return std::pair{mean, std::sqrt(q.value() / (n - 1.0) / n)};
      };
      const auto [um, us] = stats(mu);
      const auto [vm, vs] = stats(mv);
      table.rows.push_back({eps, p_list[k], um, us, vm, vs});
    }
  }
  for (double p : p_list) {
    MomentSup s;
    s.p = p;
    double umin = std::numeric_limits<double>::infinity(), vmin = umin;
    for (const auto& r : table.rows)
      if (r.p == p) {
        s.u_max = std::max(s.u_max, r.u_mean);
        s.v_max = std::max(s.v_max, r.v_mean);
        umin = std::min(umin, r.u_mean);
        vmin = std::min(vmin, r.v_mean);
      }
    s.u_ratio = umin > 0.0 ? s.u_max / umin : (s.u_max == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
    s.v_ratio = vmin > 0.0 ? s.v_max / vmin : (s.v_max == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
    table.sup.push_back(s);
  }
  return table;
}

std::string moment_csv(const MomentTable& table) {
  std::string out = "epsilon,p,u_mean,u_se,v_mean,v_se\n";
  for (const auto& r : table.rows)
    out += format_double(r.epsilon) + "," + format_double(r.p) + "," + format_double(r.u_mean) + "," +
           format_double(r.u_se) + "," + format_double(r.v_mean) + "," + format_double(r.v_se) + "\n";
  return out;
}

std::string moment_sup_csv(const MomentTable& table) {
  std::string out = "p,u_max,v_max,u_ratio,v_ratio\n";
  for (const auto& s : table.sup)
    out += format_double(s.p) + "," + format_double(s.u_max) + "," + format_double(s.v_max) + "," +
           format_double(s.u_ratio) + "," + format_double(s.v_ratio) + "\n";
  return out;
}

}  // namespace sclaw
