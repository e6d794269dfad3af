#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sclaw/flux.hpp"
#include "sclaw/grid.hpp"
#include "sclaw/initial.hpp"
#include "sclaw/noise.hpp"
#include "sclaw/sim_config.hpp"

namespace sclaw {

/// Everything a path simulation needs besides SimConfig.
struct ModelBundle {
  FluxModel flux = FluxModel::burgers();
  NoiseModel noise;
  InitialSpec initial = SineInitial{};
};

struct MCEstimate {
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t n = 0;
  std::size_t hits = 0;
};

/// Wilson score interval at 95%.
MCEstimate wilson_estimate(std::size_t hits, std::size_t n);

/// ∫_0^T ‖a(t)-b(t)‖_{L¹} dt by the trapezoid rule over the shared snapshots.
double l1l1_distance(const Trajectory& a, const Trajectory& b);

/// SCLAW_THREADS if set and positive, else hardware concurrency (at least 1).
int default_workers();

/// Runs body(i) for i in [0, n) on `workers` threads. Indices are claimed
/// from an atomic counter; the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

/// L¹L¹ distance of each coupled pair, path indices 0..n-1.
std::vector<double> coupled_distances(double epsilon, std::size_t n, SimConfig cfg, const ModelBundle& models,
                                      int workers = 0);

/// Exceedance count of distance > iota over n coupled pairs seeded with base_seed.
MCEstimate estimate_tail(double epsilon, double iota, std::size_t n, SimConfig cfg, const ModelBundle& models,
                         std::uint64_t base_seed, int workers = 0);

struct ScanRow {
  double epsilon = 0.0;
  double iota = 0.0;
  MCEstimate estimate;
  /// ε·log p_hat, -inf when there are no hits.
  double eps_log_p = 0.0;
};

/// Closing schedule γ = δ = √ε, p = 1/ε.
struct ScheduleRow {
  double epsilon = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double p = 0.0;
};

struct ScanTable {
  std::vector<ScanRow> rows;
  std::vector<ScheduleRow> schedule;
};

/// Ladder must be strictly decreasing. Uses cfg.seed for every rung.
ScanTable exp_equiv_scan(std::span<const double> ladder, double iota, std::size_t n, const SimConfig& cfg,
                         const ModelBundle& models, int workers = 0);

std::string scan_csv(const ScanTable& table);
std::string schedule_csv(const ScanTable& table);

/// Kolmogorov distribution tail Q(λ) = 2 Σ_{j>=1} (-1)^{j-1} exp(-2 j² λ²).
double kolmogorov_q(double lambda);

struct KSResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov statistic with the asymptotic p-value
/// Q((√n_e + 0.12 + 0.11/√n_e)·D).
KSResult ks_two_sample(std::span<const double> a, std::span<const double> b);

enum class Functional { mass, l2norm, maxval };
std::string to_string(Functional f);
Functional functional_from_string(const std::string& name);
double evaluate_functional(Functional f, const ScalarField& u);

struct ScalingResult {
  Functional functional = Functional::mass;
  /// Both samples have zero variance: compared pathwise instead of by KS.
  bool exact_branch = false;
  double max_abs_diff = 0.0;
  KSResult ks;
  bool pass(double alpha = 0.01, double exact_tol = 1e-12) const {
    return exact_branch ? max_abs_diff <= exact_tol : ks.p_value > alpha;
  }
};

/// Sample A: endpoints of the unscaled equation at time ε (scaling_base stream);
/// sample B: endpoints of the scaled equation at time 1 (scaling_scaled stream).
std::vector<ScalingResult> scaling_check(double epsilon, std::span<const Functional> functionals, std::size_t n,
                                         const SimConfig& cfg, const ModelBundle& models, int workers = 0);

std::string scaling_csv(std::span<const ScalingResult> results, double epsilon, std::size_t n);

struct MomentRow {
  double epsilon = 0.0;
  double p = 0.0;
  double u_mean = 0.0;
  double u_se = 0.0;
  double v_mean = 0.0;
  double v_se = 0.0;
};

struct MomentSup {
  double p = 0.0;
  double u_max = 0.0;
  double v_max = 0.0;
  /// max/min of the ladder means.
  double u_ratio = 0.0;
  double v_ratio = 0.0;
};

struct MomentTable {
  std::vector<MomentRow> rows;
  std::vector<MomentSup> sup;
};

/// Estimates E[max_t ‖·‖_p^p] for both coupled solutions at each ε; p in [1, 8].
MomentTable moment_scan(std::span<const double> ladder, std::span<const double> p_list, std::size_t n,
                        const SimConfig& cfg, const ModelBundle& models, int workers = 0);

std::string moment_csv(const MomentTable& table);
std::string moment_sup_csv(const MomentTable& table);

}  // namespace sclaw
