#include "sclaw/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sclaw/errors.hpp"
#include "sclaw/grid.hpp"

namespace sclaw {

namespace {

constexpr double kRatioSlack = 1e-12;

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = (n == 1) ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

std::vector<double> torus_lattice(int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = static_cast<double>(i) / n;
  return v;
}

// Tracks max lhs/rhs; a zero rhs with non-zero lhs is an infinite ratio.
struct WorstRatio {
  CertificateEntry entry;

  explicit WorstRatio(std::string name) { entry.name = std::move(name); }

  void observe(double lhs, double rhs, std::initializer_list<double> where) {
    if (!std::isfinite(lhs) || !std::isfinite(rhs))
      throw NumericalFailure("non-finite evaluation while checking " + entry.name);
    double ratio;
    if (rhs > 0.0)
      ratio = lhs / rhs;
    else
      ratio = lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    if (entry.argmax.empty() || ratio > entry.worst_ratio) {
      entry.worst_ratio = std::max(ratio, entry.worst_ratio);
      entry.argmax.assign(where);
    }
  }

  CertificateEntry finish() {
    entry.pass = entry.worst_ratio <= 1.0 + kRatioSlack;
    return entry;
  }
};

}  // namespace

bool CertificateReport::pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass; });
}

const CertificateEntry& CertificateReport::at(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw PreconditionError("no certificate entry named " + name);
}

CertificateReport validate_flux(const FluxModel& model, double R_val, int lattice_n) {
  if (!(R_val > 0.0)) throw PreconditionError("validate_flux: R_val must be positive");
  if (lattice_n < 100) throw PreconditionError("validate_flux: lattice_n must be >= 100");

  const auto xs = linspace(-R_val, R_val, lattice_n);
  const double N = model.growth_constant(), q0 = model.q0();

  std::vector<double> a(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    a[i] = model.derivative(xs[i]);
    if (!std::isfinite(a[i])) throw NumericalFailure("non-finite flux derivative at xi=" + std::to_string(xs[i]));
  }

  WorstRatio growth("flux_growth");
  for (std::size_t i = 0; i < xs.size(); ++i)
    growth.observe(std::fabs(a[i]), N * (1.0 + std::pow(std::fabs(xs[i]), q0)), {xs[i]});

  WorstRatio lipschitz("flux_lipschitz");
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      lipschitz.observe(std::fabs(a[i] - a[j]), model.upsilon(xs[i], xs[j]) * std::fabs(xs[i] - xs[j]),
                        {xs[i], xs[j]});

  CertificateReport report;
  report.entries = {growth.finish(), lipschitz.finish()};
  return report;
}

CertificateReport validate_noise(const NoiseModel& model, double R_val, int lattice_n) {
  if (!(R_val > 0.0)) throw PreconditionError("validate_noise: R_val must be positive");
  if (lattice_n < 2) throw PreconditionError("validate_noise: lattice_n must be >= 2");

  const auto us = linspace(-R_val, R_val, lattice_n);
  const auto xs = torus_lattice(64);
  const auto us_pair = linspace(-R_val, R_val, std::min(lattice_n, 32));
  const auto xs_pair = torus_lattice(32);
  const int K = model.K();
  const double D0 = model.D0(), D1 = model.D1();

  WorstRatio bound("noise_bound");        // |g_k| <= C0_k (1+|u|)
  WorstRatio lipschitz("noise_lipschitz"); // |g_k(x,u)-g_k(y,v)| <= C1_k(|x-y|+|u-v|)
  WorstRatio g2("noise_G2");               // G² <= D0 (1+u²)
  WorstRatio pair_sq("noise_pair_square"); // Σ|Δg_k|² <= D1(|x-y|²+|u-v|²)

  for (double x : xs)
    for (double u : us) {
      for (int k = 0; k < K; ++k)
        bound.observe(std::fabs(model.g(k, x, u)), model.C0(k) * (1.0 + std::fabs(u)), {static_cast<double>(k), x, u});
      g2.observe(model.G2(x, u), D0 * (1.0 + u * u), {x, u});
    }

  for (double x : xs_pair)
    for (double u : us_pair)
      for (double y : xs_pair)
        for (double v : us_pair) {
          if (x == y && u == v) continue;
          const double dxy = torus_distance(x, y), duv = std::fabs(u - v);
          double sq = 0.0;
          for (int k = 0; k < K; ++k) {
            const double d = model.g(k, x, u) - model.g(k, y, v);
            sq += d * d;
            lipschitz.observe(std::fabs(d), model.C1(k) * (dxy + duv), {static_cast<double>(k), x, u, y, v});
          }
          pair_sq.observe(sq, D1 * (dxy * dxy + duv * duv), {x, u, y, v});
        }

  CertificateReport report;
  report.entries = {bound.finish(), lipschitz.finish(), g2.finish(), pair_sq.finish()};
  report.D0 = D0;
  report.D1 = D1;
  return report;
}

}  // namespace sclaw
