#include "sclaw/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sclaw/errors.hpp"
#include "sclaw/numerics.hpp"

namespace sclaw {

std::string to_string(Profile p) {
  switch (p) {
    case Profile::constant: return "const";
    case Profile::cosine: return "cos";
    case Profile::sine: return "sin";
  }
  return "unknown";
}

double NoiseMode::profile_at(double x) const noexcept {
  switch (profile) {
    case Profile::constant: return 1.0;
    case Profile::cosine: return std::cos(2.0 * std::numbers::pi * wavenumber * x);
    case Profile::sine: return std::sin(2.0 * std::numbers::pi * wavenumber * x);
  }
  return 0.0;
}

double NoiseMode::profile_slope() const noexcept {
  return profile == Profile::constant ? 0.0 : 2.0 * std::numbers::pi * std::abs(wavenumber);
}

NoiseModel::NoiseModel(std::vector<NoiseMode> modes, double reference_range)
    : modes_(std::move(modes)), reference_range_(reference_range) {
  if (!(reference_range > 0.0) || !std::isfinite(reference_range))
    throw ConfigError("noise reference range must be positive");
  double s2 = 0.0;
  for (const auto& m : modes_) {
    if (!std::isfinite(m.sigma) || !std::isfinite(m.alpha) || !std::isfinite(m.beta))
      throw ConfigError("noise mode parameters must be finite");
    if (m.profile != Profile::constant && m.wavenumber == 0)
      throw ConfigError("noise mode wavenumber must be non-zero for cos/sin profiles");
    s2 += m.sigma * m.sigma;
  }
  if (!std::isfinite(s2)) throw ConfigError("noise amplitudes are not square-summable (sum of sigma^2 overflows)");
}

double NoiseModel::G2(double x, double u) const noexcept {
  double s = 0.0;
  for (const auto& m : modes_) {
    const double g = m.eval(x, u);
    s += g * g;
  }
  return s;
}

double NoiseModel::G12(double x, double xi, double y, double zeta) const noexcept {
  double s = 0.0;
  for (const auto& m : modes_) s += m.eval(x, xi) * m.eval(y, zeta);
  return s;
}

double NoiseModel::C0(int k) const noexcept {
  const auto& m = modes_[k];
  return std::fabs(m.sigma) * (std::fabs(m.alpha) + std::fabs(m.beta));
}

double NoiseModel::C1(int k) const noexcept {
  const auto& m = modes_[k];
  const double x_slope = m.profile_slope() * (std::fabs(m.alpha) + std::fabs(m.beta) * reference_range_);
  return std::fabs(m.sigma) * std::max(x_slope, std::fabs(m.beta));
}

double NoiseModel::D0() const noexcept {
  NeumaierSum s;
  for (int k = 0; k < K(); ++k) s += C0(k) * C0(k);
  return 2.0 * s.value();
}

double NoiseModel::D1() const noexcept {
  NeumaierSum s;
  for (int k = 0; k < K(); ++k) s += C1(k) * C1(k);
  return 2.0 * s.value();
}

bool NoiseModel::is_zero() const noexcept {
  return std::all_of(modes_.begin(), modes_.end(), [](const NoiseMode& m) {
    return m.sigma == 0.0 || (m.alpha == 0.0 && m.beta == 0.0);
  });
}

}  // namespace sclaw
