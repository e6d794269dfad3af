#pragma once

#include <variant>

#include "sclaw/grid.hpp"

namespace sclaw {

struct ConstantInitial {
  double value = 0.0;
};

/// u = left on [0, x0), right on [x0, 1); periodic, so a second jump sits at 0.
struct RiemannInitial {
  double left = 1.0;
  double right = 0.0;
  double x0 = 0.5;
};

/// u = mean + amplitude·sin(2π·mode·x).
struct SineInitial {
  double mean = 0.0;
  double amplitude = 1.0;
  int mode = 1;
};

using InitialSpec = std::variant<ConstantInitial, RiemannInitial, SineInitial>;

/// Exact cell averages of the requested initial profile.
ScalarField make_initial(const InitialSpec& spec, const TorusGrid& grid);

}  // namespace sclaw
