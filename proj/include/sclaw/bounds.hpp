#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sclaw/certificates.hpp"
#include "sclaw/flux.hpp"
#include "sclaw/grid.hpp"
#include "sclaw/kinetic.hpp"
#include "sclaw/noise.hpp"
#include "sclaw/numerics.hpp"

namespace sclaw {

/// One pathwise inequality lhs <= rhs; pass iff lhs <= rhs·(1+1e-9).
struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
  double epsilon = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  std::int64_t path = -1;
};

BoundReport make_report(std::string name, double lhs, double rhs, double epsilon, const MollifierPair& moll,
                        std::int64_t path);

/// CSV header `name,path,epsilon,gamma,delta,lhs,rhs,pass`.
std::string bound_csv_header();
std::string bound_csv_row(const BoundReport& r);

struct JReports {
  BoundReport j1;
  BoundReport j2;
  /// ε Σ ρ_γ ψ_δ Σ_k |g_k(x,u)-g_k(y,v)|² against the sum of the two bounds.
  BoundReport direct;
};

/// Time integrals use the left-point rule over the shared snapshot times.
JReports bound_check_J(const Trajectory& u, const Trajectory& v, const MollifierPair& moll, double epsilon,
                       const NoiseModel& noise, std::int64_t path = -1);

/// C(q0) = max(1, 2^q0).
double gamma_envelope_constant(double q0);

/// Γ(ξ,ζ) = ∫_{ξ'<ξ} (1+|ξ'|^q0) X((ξ'-ζ)/δ) dξ'.
double gamma_kernel(double xi, double zeta, double q0, double delta);

/// Samples Γ(ξ,ζ) <= C(q0)(1+|ξ|^(q0+1)+|ζ|^(q0+1)+δ^(q0+1)) on an n×n lattice of [-R,R]².
CertificateEntry validate_gamma_envelope(double q0, double delta, double R_val = 10.0, int n = 64);

/// Inner state integral of the flux term for Dirac states (u at x, v at y):
/// ∫_{ξ<u} a(ξ)X((ξ-v)/δ)dξ + ∫_{ξ>=u} a(ξ)X((v-ξ)/δ)dξ.
double flux_wedge(double u, double v, const FluxModel& flux, double delta);

/// sup_t |Ĩ(t)| against 2εγ⁻¹N C(q0)(1+δ^(q0+1)) + 2εγ⁻¹N C(q0)(max_t‖u‖^(q0+1) + max_t‖v‖^(q0+1)).
/// Throws PreconditionError when the Γ envelope fails on its lattice.
BoundReport bound_check_I(const Trajectory& u, const Trajectory& v, const MollifierPair& moll, double epsilon,
                          const FluxModel& flux, std::int64_t path = -1);

/// Running state of K̃ along one coupled path; usable as a CoupledObserver.
class MartingaleAccumulator {
 public:
  MartingaleAccumulator(const MollifierPair& moll, double epsilon, const NoiseModel& noise,
                        const TorusGrid& grid);

  void observe(int step, double t, double dt, const ScalarField& u, const ScalarField& v,
               std::span<const double> increments);

  double value() const noexcept { return K_; }
  double sup_square() const noexcept { return sup_sq_; }
  double quadratic_variation() const noexcept { return qv_.value(); }

 private:
  MollifierPair moll_;
  double epsilon_;
  NoiseModel noise_;
  SpatialKernel kernel_;
  TorusGrid grid_;
  double K_ = 0.0;
  double sup_sq_ = 0.0;
  NeumaierSum qv_;
  std::vector<double> S_;
};

struct MartingaleSample {
  double terminal = 0.0;
  double sup_square = 0.0;
  double quadratic_variation = 0.0;
};

struct MartingaleReport {
  std::size_t n = 0;
  double mean = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool covers_zero = true;
  double mean_sup_square = 0.0;
  double mean_qv = 0.0;
  /// mean(sup K̃²) / mean(⟨K̃⟩₁) with its delta-method relative standard error.
  double ratio = 0.0;
  double ratio_se = 0.0;
  bool doob_pass = true;
  bool pass() const noexcept { return covers_zero && doob_pass; }
};

/// Needs n >= 100 samples.
MartingaleReport martingale_diagnostic(std::span<const MartingaleSample> samples);

}  // namespace sclaw
