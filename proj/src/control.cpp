#include "sclaw/control.hpp"

#include <algorithm>
#include <cmath>

#include "sclaw/errors.hpp"

namespace sclaw {

Control::Control(int modes, int bins) : Control(modes, bins, std::vector<double>(static_cast<std::size_t>(modes) * bins, 0.0)) {}

Control::Control(int modes, int bins, std::vector<double> values)
    : modes_(modes), bins_(bins), values_(std::move(values)) {
  if (modes < 0 || bins < 1) throw PreconditionError("Control: need modes >= 0 and bins >= 1");
  if (values_.size() != static_cast<std::size_t>(modes) * bins)
    throw PreconditionError("Control: value count must equal modes*bins");
  for (double v : values_)
    if (!std::isfinite(v)) throw PreconditionError("Control: values must be finite");
}

Control Control::constant(int modes, int bins, double value) {
  return Control(modes, bins, std::vector<double>(static_cast<std::size_t>(modes) * bins, value));
}

int Control::bin_of(double t) const noexcept {
  const int b = static_cast<int>(std::floor(t * bins_));
  return std::clamp(b, 0, bins_ - 1);
}

Control Control::refined() const {
  Control r(modes_, 2 * bins_);
  for (int k = 0; k < modes_; ++k)
    for (int b = 0; b < bins_; ++b) {
      r.at(k, 2 * b) = at(k, b);
      r.at(k, 2 * b + 1) = at(k, b);
    }
  return r;
}

}  // namespace sclaw
