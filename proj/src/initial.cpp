#include "sclaw/initial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sclaw/errors.hpp"

namespace sclaw {

namespace {

struct Averager {
  const TorusGrid& grid;

  std::vector<double> operator()(const ConstantInitial& c) const {
    if (!std::isfinite(c.value)) throw PreconditionError("constant initial value must be finite");
    return std::vector<double>(grid.cells(), c.value);
  }

  std::vector<double> operator()(const RiemannInitial& r) const {
    if (!std::isfinite(r.left) || !std::isfinite(r.right) || !std::isfinite(r.x0))
      throw PreconditionError("riemann initial parameters must be finite");
    const double x0 = r.x0 - std::floor(r.x0);
    std::vector<double> v(grid.cells());
    for (int i = 0; i < grid.cells(); ++i) {
      const double a = grid.left_edge(i), b = a + grid.dx();
      // Portion of the cell inside [0, x0).
      const double left_len = std::clamp(x0, a, b) - a;
      const double frac = left_len / grid.dx();
      v[i] = frac * r.left + (1.0 - frac) * r.right;
    }
    return v;
  }

  std::vector<double> operator()(const SineInitial& s) const {
    if (!std::isfinite(s.mean) || !std::isfinite(s.amplitude))
      throw PreconditionError("sine initial parameters must be finite");
    if (s.mode == 0) throw PreconditionError("sine initial mode must be non-zero");
    const double w = 2.0 * std::numbers::pi * s.mode;
    std::vector<double> v(grid.cells());
    for (int i = 0; i < grid.cells(); ++i) {
      const double a = grid.left_edge(i), b = a + grid.dx();
      v[i] = s.mean + s.amplitude * (std::cos(w * a) - std::cos(w * b)) / (w * grid.dx());
    }
    return v;
  }
};

}  // namespace

ScalarField make_initial(const InitialSpec& spec, const TorusGrid& grid) {
  return ScalarField(grid, std::visit(Averager{grid}, spec));
}

}  // namespace sclaw
