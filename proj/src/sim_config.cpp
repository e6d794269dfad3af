#include "sclaw/sim_config.hpp"

#include <cmath>

#include "sclaw/errors.hpp"

namespace sclaw {

std::string to_string(Splitting s) { return s == Splitting::lie ? "lie" : "strang"; }

void SimConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("invalid value for key: sim.epsilon (must lie in [0,1])");
  if (cells < 2) throw ConfigError("invalid value for key: sim.cells (must be >= 2)");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("invalid value for key: sim.dt (must be > 0)");
  if (!(cfl > 0.0 && cfl < 1.0)) throw ConfigError("invalid value for key: sim.cfl (must lie in (0,1))");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("invalid value for key: sim.T (must be > 0)");
  if (save_stride < 1) throw ConfigError("invalid value for key: sim.save_stride (must be >= 1)");
  if (steps() > 10'000'000) throw ConfigError("invalid value for key: sim.dt (too many steps)");
}

int SimConfig::steps() const {
  const double n = horizon / dt;
  return std::max(1, static_cast<int>(std::ceil(n - 1e-9)));
}

}  // namespace sclaw
