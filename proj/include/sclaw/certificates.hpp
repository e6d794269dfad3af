#pragma once

#include <string>
#include <vector>

#include "sclaw/flux.hpp"
#include "sclaw/noise.hpp"

namespace sclaw {

/// Outcome of one sampled inequality: pass iff worst_ratio <= 1 (lhs/rhs over the lattice).
struct CertificateEntry {
  std::string name;
  bool pass = true;
  double worst_ratio = 0.0;
  /// Lattice point attaining the worst ratio (meaning depends on the check).
  std::vector<double> argmax;
};

struct CertificateReport {
  std::vector<CertificateEntry> entries;
  double D0 = 0.0;
  double D1 = 0.0;

  bool pass() const;
  const CertificateEntry& at(const std::string& name) const;
};

/// Samples both growth inequalities of the flux on lattice_n points of [-R, R].
CertificateReport validate_flux(const FluxModel& model, double R_val = 10.0, int lattice_n = 1024);

/// Samples the four noise bounds on x ∈ [0,1), u,v ∈ [-R, R]. Single-point
/// checks use the full lattice; pair checks a 32x32 sub-lattice per argument.
CertificateReport validate_noise(const NoiseModel& model, double R_val = 10.0, int lattice_n = 1024);

}  // namespace sclaw
