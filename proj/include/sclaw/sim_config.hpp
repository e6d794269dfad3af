#pragma once

#include <cstdint>
#include <string>

namespace sclaw {

enum class Splitting { lie, strang };

std::string to_string(Splitting s);

/// Run parameters for one path simulation on [0, T].
struct SimConfig {
  double epsilon = 0.1;
  int cells = 64;
  /// Fixed outer step; flux substeps are sub-cycled to honour `cfl`.
  double dt = 0.01;
  /// Target Courant fraction ν for the flux substeps.
  double cfl = 0.45;
  double horizon = 1.0;
  Splitting splitting = Splitting::lie;
  std::uint64_t seed = 20240601;
  int save_stride = 1;

  /// Throws ConfigError naming the offending `sim.*` key.
  void validate() const;
  /// Number of outer steps; dt is adjusted so that steps * dt == horizon.
  int steps() const;
  double step_size() const { return horizon / steps(); }
};

}  // namespace sclaw
