#pragma once

#include <string>
#include <vector>

namespace sclaw {

enum class FluxKind { zero, linear, burgers, polynomial };

std::string to_string(FluxKind kind);

/// Scalar flux A with derivative a = A'. Every supported kind is a polynomial,
/// so A, a, the Engquist-Osher split primitives and sup|a| are all exact.
///
/// The growth certificate (q0, N) is declared by the user and checked by
/// validate_flux: |a(ξ)| <= N(1+|ξ|^q0) and |a(ξ)-a(ζ)| <= Υ(ξ,ζ)|ξ-ζ|
/// with Υ = N(1+|ξ|^(q0-1)+|ζ|^(q0-1)).
class FluxModel {
 public:
  static FluxModel zero(double q0 = 2.0, double growth_constant = 0.0);
  static FluxModel linear(double speed, double q0 = 2.0, double growth_constant = -1.0);
  static FluxModel burgers(double q0 = 2.0, double growth_constant = 1.0);
  /// A(u) = Σ_j coefficients[j] u^j.
  static FluxModel polynomial(std::vector<double> coefficients, double q0, double growth_constant);

  FluxKind kind() const noexcept { return kind_; }
  double q0() const noexcept { return q0_; }
  /// N(q0).
  double growth_constant() const noexcept { return growth_; }
  const std::vector<double>& coefficients() const noexcept { return flux_coeffs_; }
  double speed() const noexcept { return speed_; }

  double flux(double u) const noexcept;
  double derivative(double u) const noexcept;
  /// Υ(ξ,ζ) from the Lipschitz-type growth bound.
  double upsilon(double xi, double zeta) const noexcept;

  /// ∫_0^x max(a(s),0) ds.
  double positive_primitive(double x) const noexcept;
  /// ∫_0^x min(a(s),0) ds.
  double negative_primitive(double x) const noexcept;
  /// Engquist-Osher flux F(ul,ur) = A(0) + ∫_0^ul a⁺ + ∫_0^ur a⁻.
  double engquist_osher(double ul, double ur) const noexcept;

  /// sup |a| over [lo, hi].
  double max_speed(double lo, double hi) const noexcept;

  bool is_zero() const noexcept { return deriv_coeffs_.empty(); }

 private:
  FluxModel(FluxKind kind, std::vector<double> coeffs, double q0, double growth);

  double integrate_signed_part(double x, bool positive) const noexcept;

  FluxKind kind_;
  std::vector<double> flux_coeffs_;
  std::vector<double> deriv_coeffs_;
  std::vector<double> deriv_roots_;       // real roots of a, ascending
  std::vector<double> deriv_crit_points_; // real roots of a', ascending
  double q0_;
  double growth_;
  double speed_ = 0.0;
};

/// Real roots of Σ c_j x^j, ascending, found by recursive isolation between
/// critical points followed by bisection to full precision.
std::vector<double> polynomial_real_roots(const std::vector<double>& coeffs);

double polynomial_eval(const std::vector<double>& coeffs, double x) noexcept;

}  // namespace sclaw
