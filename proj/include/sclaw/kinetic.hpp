#pragma once

#include <vector>

#include "sclaw/grid.hpp"

namespace sclaw {

/// Smooth bump b(z) = exp(-1/(1-z²)) on (-1,1), zero elsewhere.
double bump(double z) noexcept;
double bump_derivative(double z) noexcept;

/// Space/state mollifier pair (ρ_γ, ψ_δ) built from the bump.
/// X is the CDF of the unit kernel ψ and Ξ its primitive; both are tabulated
/// once on 4096 nodes and read back through cubic Hermite interpolation.
class MollifierPair {
 public:
  MollifierPair(double gamma, double delta);

  double gamma() const noexcept { return gamma_; }
  double delta() const noexcept { return delta_; }

  /// ∫ b over (-1,1).
  static double bump_mass();
  /// Unit kernel ψ = b / ∫b, supported in (-1,1).
  static double psi(double r);
  static double C_psi();
  static double chi(double r);
  static double Xi(double r);

  double psi_delta(double w) const { return psi(w / delta_) / delta_; }
  /// ρ_γ at the signed torus offset z (wrapped into [-1/2,1/2)).
  double rho(double z) const;
  double rho_prime(double z) const;

 private:
  double gamma_;
  double delta_;
};

/// ρ_γ sampled at the grid offsets j·dx with |j|·dx < γ. Weights are scaled
/// so Σ_j weight_j·dx = 1; slopes are the analytic derivative with the same scale.
struct SpatialKernel {
  int reach = 0;
  double dx = 0.0;
  std::vector<double> weight;  // index j + reach
  std::vector<double> slope;
  std::vector<double> offset;  // j·dx
};

SpatialKernel spatial_kernel(const MollifierPair& moll, const TorusGrid& grid);

inline bool kinetic_indicator(double u, double xi) noexcept { return u > xi; }

/// Midpoint grid on [lo, hi] with spacing close to dxi (exactly (hi-lo)/count).
struct XiGrid {
  double lo;
  double hi;
  int count;
  double step() const noexcept { return (hi - lo) / count; }
  double node(int k) const noexcept { return lo + (k + 0.5) * step(); }
  static XiGrid covering(double lo, double hi, double dxi);
};

struct Bracket {
  double plus = 0.0;
  double minus = 0.0;
};

/// ∫∫ f_u(1-f_v) and ∫∫ (1-f_u)f_v by midpoint quadrature in ξ.
Bracket bracket_identity(const ScalarField& u, const ScalarField& v, double dxi);
/// Same on a caller-supplied ξ-grid, which must cover [min-1, max+1] of both fields.
Bracket bracket_identity(const ScalarField& u, const ScalarField& v, const XiGrid& xi);

/// ∫∫ |I_{u>ξ} - I_{0>ξ}| dξ dx.
double correction_mass(const ScalarField& u, double dxi);
double correction_mass(const ScalarField& u, const XiGrid& xi);

/// Doubling functional via the Ξ reduction of the state integrals.
double doubling_functional(const ScalarField& u, const ScalarField& v, const MollifierPair& moll);
/// Same functional with the state integrals done by 2D Gauss-Legendre over the ψ_δ wedges.
double doubling_functional_bruteforce(const ScalarField& u, const ScalarField& v, const MollifierPair& moll,
                                      int panels = 8);

/// E = R - (plus + minus).
double error_term(const ScalarField& u, const ScalarField& v, const MollifierPair& moll, double dxi = 1e-4);

/// R - ∫|u-v| split as H1 (spatial shift) + H2 (state mollification).
struct ErrorSplit {
  double R = 0.0;
  double identity = 0.0;  // plus + minus
  double E = 0.0;
  double H1 = 0.0;
  double H2 = 0.0;
  double omega = 0.0;  // L¹ modulus of v at γ
};

ErrorSplit error_split(const ScalarField& u, const ScalarField& v, const MollifierPair& moll, double dxi = 1e-4);

/// sup over grid shifts 0 < |j|·dx < γ of Σ|v(x - j dx) - v(x)| dx.
double l1_modulus(const ScalarField& v, double gamma);

}  // namespace sclaw
