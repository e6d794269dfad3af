#include "sclaw/kinetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "sclaw/errors.hpp"
#include "sclaw/numerics.hpp"

namespace sclaw {

double bump(double z) noexcept {
  if (!(std::fabs(z) < 1.0)) return 0.0;
  return std::exp(-1.0 / (1.0 - z * z));
}

double bump_derivative(double z) noexcept {
  if (!(std::fabs(z) < 1.0)) return 0.0;
  const double q = 1.0 - z * z;
  return bump(z) * (-2.0 * z / (q * q));
}

namespace {

constexpr int kNodes = 4096;

struct KernelTables {
  double mass = 0.0;
  double h = 0.0;
  std::array<double, kNodes> chi{};
  std::array<double, kNodes> xi{};
  std::array<double, kNodes> psi{};

  KernelTables() {
    h = 2.0 / (kNodes - 1);
    std::array<double, kNodes> mass_cum{}, first_cum{};
    NeumaierSum m0, m1;
    for (int i = 1; i < kNodes; ++i) {
      const double a = -1.0 + (i - 1) * h;
      const double b = (i == kNodes - 1) ? 1.0 : -1.0 + i * h;
      m0 += gauss_legendre_t([](double s) { return bump(s); }, a, b);
      m1 += gauss_legendre_t([](double s) { return s * bump(s); }, a, b);
      mass_cum[i] = m0.value();
      first_cum[i] = m1.value();
    }
    mass = m0.value();
    for (int i = 0; i < kNodes; ++i) {
      const double r = (i == kNodes - 1) ? 1.0 : -1.0 + i * h;
      psi[i] = bump(r) / mass;
      chi[i] = mass_cum[i] / mass;
      // Ξ(r) = r X(r) - ∫_{-1}^r s ψ(s) ds
      xi[i] = r * chi[i] - first_cum[i] / mass;
    }
    chi[kNodes - 1] = 1.0;
    xi[kNodes - 1] = 1.0;
  }

  // Cubic Hermite on node values f with node slopes df.
  double interpolate(const std::array<double, kNodes>& f, const std::array<double, kNodes>& df, double r) const {
    const double s = (r + 1.0) / h;
    const int i = std::clamp(static_cast<int>(s), 0, kNodes - 2);
    const double t = s - i;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * f[i] + h10 * h * df[i] + h01 * f[i + 1] + h11 * h * df[i + 1];
  }
};

const KernelTables& tables() {
  static const KernelTables t;
  return t;
}

double wrap_offset(double z) noexcept { return z - std::floor(z + 0.5); }

}  // namespace

MollifierPair::MollifierPair(double gamma, double delta) : gamma_(gamma), delta_(delta) {
  if (!(gamma > 0.0 && gamma < 0.5)) throw PreconditionError("MollifierPair: gamma must lie in (0, 1/2)");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw PreconditionError("MollifierPair: delta must be positive");
}

double MollifierPair::bump_mass() { return tables().mass; }

double MollifierPair::psi(double r) { return bump(r) / tables().mass; }

double MollifierPair::C_psi() { return std::exp(-1.0) / tables().mass; }

double MollifierPair::chi(double r) {
  if (r <= -1.0) return 0.0;
  if (r >= 1.0) return 1.0;
  const auto& t = tables();
  return t.interpolate(t.chi, t.psi, r);
}

double MollifierPair::Xi(double r) {
  if (r <= -1.0) return 0.0;
  if (r >= 1.0) return r;
  const auto& t = tables();
  return t.interpolate(t.xi, t.chi, r);
}

double MollifierPair::rho(double z) const {
  return bump(wrap_offset(z) / gamma_) / (gamma_ * tables().mass);
}

double MollifierPair::rho_prime(double z) const {
  return bump_derivative(wrap_offset(z) / gamma_) / (gamma_ * gamma_ * tables().mass);
}

SpatialKernel spatial_kernel(const MollifierPair& moll, const TorusGrid& grid) {
  const double dx = grid.dx();
  if (moll.gamma() < dx) throw PreconditionError("mollifier width gamma is below the grid spacing");
  SpatialKernel k;
  k.dx = dx;
  k.reach = static_cast<int>(std::ceil(moll.gamma() / dx)) - 1;
  while ((k.reach + 1) * dx < moll.gamma()) ++k.reach;
  while (k.reach > 0 && k.reach * dx >= moll.gamma()) --k.reach;
  const int n = 2 * k.reach + 1;
  k.weight.resize(n);
  k.slope.resize(n);
  k.offset.resize(n);
  NeumaierSum total;
  for (int j = -k.reach; j <= k.reach; ++j) {
    const double z = j * dx / moll.gamma();
    k.offset[j + k.reach] = j * dx;
    k.weight[j + k.reach] = bump(z);
    k.slope[j + k.reach] = bump_derivative(z) / moll.gamma();
    total += bump(z);
  }
  const double c = 1.0 / (dx * total.value());
  for (int i = 0; i < n; ++i) {
    k.weight[i] *= c;
    k.slope[i] *= c;
  }
  return k;
}

XiGrid XiGrid::covering(double lo, double hi, double dxi) {
  if (!(dxi > 0.0)) throw PreconditionError("xi-grid spacing must be positive");
  const int count = std::max(1, static_cast<int>(std::ceil((hi - lo) / dxi - 1e-9)));
  return XiGrid{lo, lo + count * dxi, count};
}

namespace {

void require_same_grid(const ScalarField& u, const ScalarField& v) {
  if (!(u.grid() == v.grid())) throw PreconditionError("fields live on different grids");
}

void require_cover(const XiGrid& xi, double lo, double hi) {
  if (xi.count < 1 || xi.lo > lo - 1.0 || xi.hi < hi + 1.0)
    throw PreconditionError("xi-grid does not cover the field range");
}

}  // namespace

Bracket bracket_identity(const ScalarField& u, const ScalarField& v, double dxi) {
  require_same_grid(u, v);
  const double lo = std::min(u.min(), v.min()), hi = std::max(u.max(), v.max());
  return bracket_identity(u, v, XiGrid::covering(lo - 1.0, hi + 1.0, dxi));
}

Bracket bracket_identity(const ScalarField& u, const ScalarField& v, const XiGrid& xi) {
  require_same_grid(u, v);
  require_cover(xi, std::min(u.min(), v.min()), std::max(u.max(), v.max()));
  const double dx = u.grid().dx(), h = xi.step();
  NeumaierSum plus, minus;
  for (std::size_t i = 0; i < u.size(); ++i) {
    long np = 0, nm = 0;
    for (int k = 0; k < xi.count; ++k) {
      const double s = xi.node(k);
      const bool fu = kinetic_indicator(u[i], s), fv = kinetic_indicator(v[i], s);
      np += fu && !fv;
      nm += !fu && fv;
    }
    plus += np * h * dx;
    minus += nm * h * dx;
  }
  return {plus.value(), minus.value()};
}

double correction_mass(const ScalarField& u, double dxi) {
  return correction_mass(u, XiGrid::covering(std::min(u.min(), 0.0) - 1.0, std::max(u.max(), 0.0) + 1.0, dxi));
}

double correction_mass(const ScalarField& u, const XiGrid& xi) {
  require_cover(xi, std::min(u.min(), 0.0), std::max(u.max(), 0.0));
  const double dx = u.grid().dx(), h = xi.step();
  NeumaierSum total;
  for (std::size_t i = 0; i < u.size(); ++i) {
    long n = 0;
    for (int k = 0; k < xi.count; ++k) {
      const double s = xi.node(k);
      n += kinetic_indicator(u[i], s) != kinetic_indicator(0.0, s);
    }
    total += n * h * dx;
  }
  return total.value();
}

namespace {

template <class PairValue>
double kernel_sum(const ScalarField& u, const ScalarField& v, const SpatialKernel& k, PairValue&& pair) {
  const auto& grid = u.grid();
  const double dx = grid.dx();
  NeumaierSum total;
  for (int i = 0; i < grid.cells(); ++i)
    for (int j = -k.reach; j <= k.reach; ++j) {
      const double w = k.weight[j + k.reach];
      if (w == 0.0) continue;
      total += w * pair(u[i], v[grid.wrap(i - j)]) * dx * dx;
    }
  return total.value();
}

// ∫_{ξ<a} ∫_{ζ≥b} ψ_δ(ξ-ζ) dζ dξ by nested Gauss-Legendre.
double wedge_bruteforce(double a, double b, const MollifierPair& moll, int panels) {
  const double d = moll.delta();
  if (a <= b - d) return 0.0;
  auto inner = [&](double s) {
    const double lo = std::max(b, s - d), hi = s + d;
    if (hi <= lo) return 0.0;
    return gauss_legendre_t([&](double z) { return moll.psi_delta(s - z); }, lo, hi, panels);
  };
  double total = gauss_legendre_t(inner, b - d, std::min(a, b + d), panels);
  if (a > b + d) total += gauss_legendre_t(inner, b + d, a, panels);
  return total;
}

}  // namespace

double doubling_functional(const ScalarField& u, const ScalarField& v, const MollifierPair& moll) {
  require_same_grid(u, v);
  const auto k = spatial_kernel(moll, u.grid());
  const double d = moll.delta();
  return kernel_sum(u, v, k, [d](double a, double b) {
    return d * (MollifierPair::Xi((a - b) / d) + MollifierPair::Xi((b - a) / d));
  });
}

double doubling_functional_bruteforce(const ScalarField& u, const ScalarField& v, const MollifierPair& moll,
                                      int panels) {
  require_same_grid(u, v);
  if (panels < 1) throw PreconditionError("brute-force quadrature needs at least one panel");
  const auto k = spatial_kernel(moll, u.grid());
  return kernel_sum(u, v, k, [&](double a, double b) {
    // second wedge ∫_{ξ≥a}∫_{ζ<b} maps onto the first under (ξ,ζ) -> (-ξ,-ζ)
    return wedge_bruteforce(a, b, moll, panels) + wedge_bruteforce(-a, -b, moll, panels);
  });
}

double error_term(const ScalarField& u, const ScalarField& v, const MollifierPair& moll, double dxi) {
  const auto br = bracket_identity(u, v, dxi);
  return doubling_functional(u, v, moll) - (br.plus + br.minus);
}

double l1_modulus(const ScalarField& v, double gamma) {
  const auto& grid = v.grid();
  const double dx = grid.dx();
  double best = 0.0;
  for (int j = 1; j * dx < gamma && j < grid.cells(); ++j)
    for (int sign : {-1, 1}) {
      NeumaierSum s;
      for (int i = 0; i < grid.cells(); ++i) s += std::fabs(v[grid.wrap(i - sign * j)] - v[i]) * dx;
      best = std::max(best, s.value());
    }
  return best;
}

ErrorSplit error_split(const ScalarField& u, const ScalarField& v, const MollifierPair& moll, double dxi) {
  require_same_grid(u, v);
  ErrorSplit out;
  const auto k = spatial_kernel(moll, u.grid());
  out.R = doubling_functional(u, v, moll);
  const auto br = bracket_identity(u, v, dxi);
  out.identity = br.plus + br.minus;
  out.E = out.R - out.identity;
  const double shifted = kernel_sum(u, v, k, [](double a, double b) { return std::fabs(a - b); });
  NeumaierSum direct;
  for (std::size_t i = 0; i < u.size(); ++i) direct += std::fabs(u[i] - v[i]) * u.grid().dx();
  out.H2 = out.R - shifted;
  out.H1 = shifted - direct.value();
  out.omega = l1_modulus(v, moll.gamma());
  return out;
}

}  // namespace sclaw
