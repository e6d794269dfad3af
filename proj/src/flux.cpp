#include "sclaw/flux.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sclaw/errors.hpp"

namespace sclaw {

namespace {

std::vector<double> trimmed(std::vector<double> c) {
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  return c;
}

std::vector<double> derivative_of(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t j = 1; j < c.size(); ++j) d.push_back(static_cast<double>(j) * c[j]);
  return trimmed(std::move(d));
}

// Root of a polynomial known to be monotone on [lo, hi] with a sign change.
double bisect(const std::vector<double>& c, double lo, double hi) {
  double flo = polynomial_eval(c, lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = polynomial_eval(c, mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double polynomial_eval(const std::vector<double>& coeffs, double x) noexcept {
  double r = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * x + *it;
  return r;
}

std::vector<double> polynomial_real_roots(const std::vector<double>& raw) {
  const auto c = trimmed(raw);
  if (c.size() <= 1) return {};
  if (c.size() == 2) return {-c[0] / c[1]};

  // Cauchy bound: every real root lies in [-B, B].
  double bound = 0.0;
  for (std::size_t j = 0; j + 1 < c.size(); ++j) bound = std::max(bound, std::fabs(c[j] / c.back()));
  bound += 1.0;

  std::vector<double> pts{-bound};
  for (double r : polynomial_real_roots(derivative_of(c)))
    if (r > -bound && r < bound) pts.push_back(r);
  pts.push_back(bound);

  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1];
    const double fa = polynomial_eval(c, a), fb = polynomial_eval(c, b);
    if (fa == 0.0) {
      if (roots.empty() || roots.back() != a) roots.push_back(a);
      continue;
    }
    if (fb == 0.0) continue;  // picked up as the left end of the next piece
    if ((fa < 0.0) != (fb < 0.0)) roots.push_back(bisect(c, a, b));
  }
  if (polynomial_eval(c, pts.back()) == 0.0) roots.push_back(pts.back());
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

std::string to_string(FluxKind kind) {
  switch (kind) {
    case FluxKind::zero: return "zero";
    case FluxKind::linear: return "linear";
    case FluxKind::burgers: return "burgers";
    case FluxKind::polynomial: return "polynomial";
  }
  return "unknown";
}

FluxModel::FluxModel(FluxKind kind, std::vector<double> coeffs, double q0, double growth)
    : kind_(kind), flux_coeffs_(trimmed(std::move(coeffs))), q0_(q0), growth_(growth) {
  if (!(q0 > 1.0) || !std::isfinite(q0)) throw ConfigError("flux growth degree q0 must be > 1");
  if (!(growth >= 0.0) || !std::isfinite(growth)) throw ConfigError("flux growth constant N must be >= 0");
  for (double c : flux_coeffs_)
    if (!std::isfinite(c)) throw ConfigError("flux coefficients must be finite");
  deriv_coeffs_ = derivative_of(flux_coeffs_);
  deriv_roots_ = polynomial_real_roots(deriv_coeffs_);
  deriv_crit_points_ = polynomial_real_roots(derivative_of(deriv_coeffs_));
}

FluxModel FluxModel::zero(double q0, double growth_constant) {
  return FluxModel(FluxKind::zero, {}, q0, growth_constant);
}

FluxModel FluxModel::linear(double speed, double q0, double growth_constant) {
  // |c| <= N(1+|ξ|^q0) holds with N = |c|.
  FluxModel m(FluxKind::linear, {0.0, speed}, q0, growth_constant < 0.0 ? std::fabs(speed) : growth_constant);
  m.speed_ = speed;
  return m;
}

FluxModel FluxModel::burgers(double q0, double growth_constant) {
  return FluxModel(FluxKind::burgers, {0.0, 0.0, 0.5}, q0, growth_constant);
}

FluxModel FluxModel::polynomial(std::vector<double> coefficients, double q0, double growth_constant) {
  return FluxModel(FluxKind::polynomial, std::move(coefficients), q0, growth_constant);
}

double FluxModel::flux(double u) const noexcept { return polynomial_eval(flux_coeffs_, u); }
double FluxModel::derivative(double u) const noexcept { return polynomial_eval(deriv_coeffs_, u); }

double FluxModel::upsilon(double xi, double zeta) const noexcept {
  return growth_ * (1.0 + std::pow(std::fabs(xi), q0_ - 1.0) + std::pow(std::fabs(zeta), q0_ - 1.0));
}

double FluxModel::integrate_signed_part(double x, bool positive) const noexcept {
  if (x == 0.0 || deriv_coeffs_.empty()) return 0.0;
  // Oriented breakpoints from 0 to x; a has constant sign between them.
  double total = 0.0;
  double prev = 0.0;
  auto accumulate = [&](double next) {
    const double mid = 0.5 * (prev + next);
    const double s = derivative(mid);
    if ((positive && s > 0.0) || (!positive && s < 0.0)) total += flux(next) - flux(prev);
    prev = next;
  };
  if (x > 0.0) {
    for (double r : deriv_roots_)
      if (r > 0.0 && r < x) accumulate(r);
  } else {
    for (auto it = deriv_roots_.rbegin(); it != deriv_roots_.rend(); ++it)
      if (*it < 0.0 && *it > x) accumulate(*it);
  }
  accumulate(x);
  return total;
}

double FluxModel::positive_primitive(double x) const noexcept { return integrate_signed_part(x, true); }
double FluxModel::negative_primitive(double x) const noexcept { return integrate_signed_part(x, false); }

double FluxModel::engquist_osher(double ul, double ur) const noexcept {
  return flux(0.0) + positive_primitive(ul) + negative_primitive(ur);
}

double FluxModel::max_speed(double lo, double hi) const noexcept {
  if (lo > hi) std::swap(lo, hi);
  double m = std::max(std::fabs(derivative(lo)), std::fabs(derivative(hi)));
  for (double r : deriv_crit_points_)
    if (r > lo && r < hi) m = std::max(m, std::fabs(derivative(r)));
  return m;
}

}  // namespace sclaw
