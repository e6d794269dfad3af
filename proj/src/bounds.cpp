#include "sclaw/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "sclaw/errors.hpp"
#include "sclaw/io.hpp"
#include "sclaw/solvers.hpp"

namespace sclaw {

BoundReport make_report(std::string name, double lhs, double rhs, double epsilon, const MollifierPair& moll,
                        std::int64_t path) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.pass = lhs <= rhs * (1.0 + 1e-9);
  r.epsilon = epsilon;
  r.gamma = moll.gamma();
  r.delta = moll.delta();
  r.path = path;
  return r;
}

std::string bound_csv_header() { return "name,path,epsilon,gamma,delta,lhs,rhs,pass"; }

std::string bound_csv_row(const BoundReport& r) {
  return r.name + "," + std::to_string(r.path) + "," + format_double(r.epsilon) + "," + format_double(r.gamma) +
         "," + format_double(r.delta) + "," + format_double(r.lhs) + "," + format_double(r.rhs) + "," +
         (r.pass ? "true" : "false");
}

namespace {

void require_pair(const Trajectory& u, const Trajectory& v) {
  if (!(u.grid() == v.grid())) throw PreconditionError("coupled trajectories live on different grids");
  if (u.size() != v.size() || u.size() < 2) throw PreconditionError("coupled trajectories need a shared time grid");
  for (std::size_t n = 0; n < u.size(); ++n)
    if (u.times()[n] != v.times()[n]) throw PreconditionError("coupled trajectories need a shared time grid");
}

}  // namespace

JReports bound_check_J(const Trajectory& u, const Trajectory& v, const MollifierPair& moll, double epsilon,
                       const NoiseModel& noise, std::int64_t path) {
  require_pair(u, v);
  const auto& grid = u.grid();
  const auto k = spatial_kernel(moll, grid);
  const double dx = grid.dx(), d = moll.delta(), D1 = noise.D1();
  const auto times = u.times();

  NeumaierSum j1, j2, direct;
  for (std::size_t n = 0; n + 1 < u.size(); ++n) {
    const double dt = times[n + 1] - times[n];
    const auto& fu = u.fields()[n];
    const auto& fv = v.fields()[n];
    for (int i = 0; i < grid.cells(); ++i)
      for (int j = -k.reach; j <= k.reach; ++j) {
        const double w = k.weight[j + k.reach] * dx * dx * dt;
        if (w == 0.0) continue;
        const int iy = grid.wrap(i - j);
        const double diff = fu[i] - fv[iy];
        const double p = moll.psi_delta(diff);
        if (p == 0.0) continue;
        const double z = k.offset[j + k.reach];
        j1 += w * z * z * p;
        if (std::fabs(diff) <= d) j2 += w * p * diff * diff;
        double g2 = 0.0;
        for (int m = 0; m < noise.K(); ++m) {
          const double dg = noise.g(m, grid.center(i), fu[i]) - noise.g(m, grid.center(iy), fv[iy]);
          g2 += dg * dg;
        }
        direct += w * p * g2;
      }
  }
  const double g = moll.gamma();
  const double rhs1 = epsilon * D1 * g * g / d;
  const double rhs2 = epsilon * d * D1 * MollifierPair::C_psi();
  JReports out;
  out.j1 = make_report("J1", epsilon * D1 * j1.value(), rhs1, epsilon, moll, path);
  out.j2 = make_report("J2", epsilon * D1 * j2.value(), rhs2, epsilon, moll, path);
  out.direct = make_report("J", epsilon * direct.value(), rhs1 + rhs2, epsilon, moll, path);
  return out;
}

double gamma_envelope_constant(double q0) { return std::max(1.0, std::pow(2.0, q0)); }

double gamma_kernel(double xi, double zeta, double q0, double delta) {
  if (xi <= zeta - delta) return 0.0;
  auto weight = [q0](double s) { return 1.0 + std::pow(std::fabs(s), q0); };
  double total = gauss_legendre_t(
      [&](double s) { return weight(s) * MollifierPair::chi((s - zeta) / delta); }, zeta - delta,
      std::min(xi, zeta + delta), 8);
  const double lo = zeta + delta;
  if (xi > lo) {
    // |s|^q0 has a kink at 0
    if (lo < 0.0 && xi > 0.0)
      total += gauss_legendre_t(weight, lo, 0.0, 8) + gauss_legendre_t(weight, 0.0, xi, 8);
    else
      total += gauss_legendre_t(weight, lo, xi, 8);
  }
  return total;
}

CertificateEntry validate_gamma_envelope(double q0, double delta, double R_val, int n) {
  if (n < 2 || !(R_val > 0.0)) throw PreconditionError("Gamma envelope lattice needs n >= 2 and R > 0");
  CertificateEntry e;
  e.name = "gamma_envelope";
  const double C = gamma_envelope_constant(q0);
  const double p = q0 + 1.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double xi = -R_val + 2.0 * R_val * a / (n - 1);
      const double zeta = -R_val + 2.0 * R_val * b / (n - 1);
      const double lhs = gamma_kernel(xi, zeta, q0, delta);
      const double rhs = C * (1.0 + std::pow(std::fabs(xi), p) + std::pow(std::fabs(zeta), p) + std::pow(delta, p));
      const double ratio = lhs / rhs;
      if (e.argmax.empty() || ratio > e.worst_ratio) {
        e.worst_ratio = ratio;
        e.argmax = {xi, zeta};
      }
    }
  e.pass = e.worst_ratio <= 1.0 + 1e-12;
  return e;
}

double flux_wedge(double u, double v, const FluxModel& flux, double delta) {
  auto a = [&flux](double s) { return flux.derivative(s); };
  double total = 0.0;
  // f(u) (1 - f(v)) part
  if (u > v - delta)
    total += gauss_legendre_t([&](double s) { return a(s) * MollifierPair::chi((s - v) / delta); }, v - delta,
                              std::min(u, v + delta), 4);
  if (u > v + delta) total += flux.flux(u) - flux.flux(v + delta);
  // (1 - f(u)) f(v) part
  if (u < v - delta) total += flux.flux(v - delta) - flux.flux(u);
  if (u < v + delta)
    total += gauss_legendre_t([&](double s) { return a(s) * MollifierPair::chi((v - s) / delta); },
                              std::max(u, v - delta), v + delta, 4);
  return total;
}

BoundReport bound_check_I(const Trajectory& u, const Trajectory& v, const MollifierPair& moll, double epsilon,
                          const FluxModel& flux, std::int64_t path) {
  require_pair(u, v);
  const double q0 = flux.q0();
  const auto envelope = validate_gamma_envelope(q0, moll.delta());
  if (!envelope.pass) throw PreconditionError("Gamma envelope with C(q0) fails on the validation lattice");

  const auto& grid = u.grid();
  const auto k = spatial_kernel(moll, grid);
  const double dx = grid.dx();
  const auto times = u.times();

  double sup_abs = 0.0;
  NeumaierSum running;
  if (!flux.is_zero()) {
    for (std::size_t n = 0; n + 1 < u.size(); ++n) {
      const double dt = times[n + 1] - times[n];
      const auto& fu = u.fields()[n];
      const auto& fv = v.fields()[n];
      NeumaierSum step;
      for (int i = 0; i < grid.cells(); ++i)
        for (int j = -k.reach; j <= k.reach; ++j) {
          const double s = k.slope[j + k.reach];
          if (s == 0.0) continue;
          step += s * flux_wedge(fu[i], fv[grid.wrap(i - j)], flux, moll.delta()) * dx * dx;
        }
      running += epsilon * dt * step.value();
      sup_abs = std::max(sup_abs, std::fabs(running.value()));
    }
  }

  const double C = gamma_envelope_constant(q0), N = flux.growth_constant(), p = q0 + 1.0;
  const double moments = lp_moment(u, p) + lp_moment(v, p);
  const double base = 2.0 / moll.gamma() * N * C * ((1.0 + std::pow(moll.delta(), p)) + moments);
  return make_report("I", sup_abs, epsilon * base, epsilon, moll, path);
}

MartingaleAccumulator::MartingaleAccumulator(const MollifierPair& moll, double epsilon, const NoiseModel& noise,
                                             const TorusGrid& grid)
    : moll_(moll),
      epsilon_(epsilon),
      noise_(noise),
      kernel_(spatial_kernel(moll, grid)),
      grid_(grid),
      S_(noise.K(), 0.0) {}

void MartingaleAccumulator::observe(int, double, double dt, const ScalarField& u, const ScalarField& v,
                                    std::span<const double> increments) {
  if (noise_.is_zero()) return;
  const int M = grid_.cells(), K = noise_.K();
  const double dx = grid_.dx(), d = moll_.delta();
  std::vector<double> gu(static_cast<std::size_t>(K) * M), gv(gu.size());
  for (int m = 0; m < K; ++m)
    for (int i = 0; i < M; ++i) {
      gu[m * M + i] = noise_.g(m, grid_.center(i), u[i]);
      gv[m * M + i] = noise_.g(m, grid_.center(i), v[i]);
    }
  std::fill(S_.begin(), S_.end(), 0.0);
  for (int i = 0; i < M; ++i)
    for (int j = -kernel_.reach; j <= kernel_.reach; ++j) {
      const double w = kernel_.weight[j + kernel_.reach];
      if (w == 0.0) continue;
      const int iy = grid_.wrap(i - j);
      const double c = w * MollifierPair::chi((u[i] - v[iy]) / d) * dx * dx;
      if (c == 0.0) continue;
      for (int m = 0; m < K; ++m) S_[m] += c * (gu[m * M + i] - gv[m * M + iy]);
    }
  double dK = 0.0, dQ = 0.0;
  for (int m = 0; m < K; ++m) {
    dK += S_[m] * increments[m];
    dQ += S_[m] * S_[m];
  }
  K_ += 2.0 * std::sqrt(epsilon_) * dK;
  qv_ += 4.0 * epsilon_ * dQ * dt;
  sup_sq_ = std::max(sup_sq_, K_ * K_);
}

MartingaleReport martingale_diagnostic(std::span<const MartingaleSample> samples) {
  if (samples.size() < 100) throw PreconditionError("martingale diagnostic needs at least 100 paths");
  const double n = static_cast<double>(samples.size());
  NeumaierSum sk, ss, sq;
  for (const auto& s : samples) {
    sk += s.terminal;
    ss += s.sup_square;
    sq += s.quadratic_variation;
  }
  MartingaleReport r;
  r.n = samples.size();
  r.mean = sk.value() / n;
  r.mean_sup_square = ss.value() / n;
  r.mean_qv = sq.value() / n;
  NeumaierSum vk, va, vb, cab;
  for (const auto& s : samples) {
    const double dk = s.terminal - r.mean, da = s.sup_square - r.mean_sup_square,
                 db = s.quadratic_variation - r.mean_qv;
    vk += dk * dk;
    va += da * da;
    vb += db * db;
    cab += da * db;
  }
  const double se = std::sqrt(vk.value() / (n - 1.0) / n);
  r.ci_lo = r.mean - 1.959963984540054 * se;
  r.ci_hi = r.mean + 1.959963984540054 * se;
  r.covers_zero = r.ci_lo <= 0.0 && 0.0 <= r.ci_hi;
  if (r.mean_qv > 0.0) {
    const double A = r.mean_sup_square, B = r.mean_qv;
    r.ratio = A / B;
    const double var_a = va.value() / (n - 1.0), var_b = vb.value() / (n - 1.0), cov = cab.value() / (n - 1.0);
    const double var_ratio = (var_a / (B * B) - 2.0 * cov * A / (B * B * B) + A * A * var_b / (B * B * B * B)) / n;
    r.ratio_se = r.ratio > 0.0 ? std::sqrt(std::max(0.0, var_ratio)) / r.ratio : 0.0;
    r.doob_pass = r.ratio <= 4.0 * (1.0 + 3.0 * r.ratio_se);
  } else {
    r.doob_pass = r.mean_sup_square == 0.0;
  }
  return r;
}

}  // namespace sclaw
