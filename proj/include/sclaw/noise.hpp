#pragma once

#include <span>
#include <string>
#include <vector>

namespace sclaw {

enum class Profile { constant, cosine, sine };

std::string to_string(Profile p);

/// One noise mode g_k(x,u) = σ φ(x) (α + β u), φ ∈ {1, cos(2πmx), sin(2πmx)}.
struct NoiseMode {
  double sigma = 0.0;
  Profile profile = Profile::constant;
  int wavenumber = 1;
  double alpha = 1.0;
  double beta = 0.0;

  double profile_at(double x) const noexcept;
  /// Lipschitz constant of the spatial profile on the torus.
  double profile_slope() const noexcept;
  double eval(double x, double u) const noexcept { return sigma * profile_at(x) * (alpha + beta * u); }
};

/// Finite family of noise coefficients (the K-mode truncation of the
/// cylindrical Wiener process) with its growth and Lipschitz constants.
///
/// C⁰_k = |σ|(|α|+|β|) gives |g_k(x,u)| <= C⁰_k(1+|u|) for all u.
/// C¹_k = |σ| max(slope·(|α|+|β|R), |β|) gives the joint Lipschitz bound for
/// |u|,|v| <= R where R = reference_range(); for β = 0 or a constant profile
/// it is global.
class NoiseModel {
 public:
  NoiseModel() = default;
  explicit NoiseModel(std::vector<NoiseMode> modes, double reference_range = 10.0);

  int K() const noexcept { return static_cast<int>(modes_.size()); }
  const std::vector<NoiseMode>& modes() const noexcept { return modes_; }
  double reference_range() const noexcept { return reference_range_; }

  double g(int k, double x, double u) const noexcept { return modes_[k].eval(x, u); }
  /// G²(x,u) = Σ_k g_k(x,u)².
  double G2(double x, double u) const noexcept;
  /// G_{1,2}(x,ξ,y,ζ) = Σ_k g_k(x,ξ) g_k(y,ζ).
  double G12(double x, double xi, double y, double zeta) const noexcept;

  double C0(int k) const noexcept;
  double C1(int k) const noexcept;
  /// D0 = 2 Σ (C⁰_k)².
  double D0() const noexcept;
  /// D1 = 2 Σ (C¹_k)².
  double D1() const noexcept;

  bool is_zero() const noexcept;

 private:
  std::vector<NoiseMode> modes_;
  double reference_range_ = 10.0;
};

}  // namespace sclaw
