#include "sclaw/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sclaw/errors.hpp"
#include "sclaw/numerics.hpp"

namespace sclaw {

TorusGrid::TorusGrid(int cells) : cells_(cells), dx_(0.0) {
  if (cells < 2) throw PreconditionError("TorusGrid needs at least 2 cells, got " + std::to_string(cells));
  dx_ = 1.0 / cells;
}

double torus_distance(double x, double y) noexcept {
  double d = std::fabs(x - y);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

ScalarField::ScalarField(TorusGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(grid_.cells()))
    throw PreconditionError("ScalarField: " + std::to_string(values_.size()) + " values for " +
                            std::to_string(grid_.cells()) + " cells");
  for (double v : values_)
    if (!std::isfinite(v)) throw PreconditionError("ScalarField: non-finite value");
}

ScalarField ScalarField::constant(TorusGrid grid, double value) {
  return ScalarField(grid, std::vector<double>(grid.cells(), value));
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::mean() const {
  NeumaierSum s;
  for (double v : values_) s += v;
  return s.value() / static_cast<double>(values_.size());
}

double ScalarField::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

ScalarField FieldBuilder::build() && {
  if (values_.size() != static_cast<std::size_t>(grid_.cells()))
    throw PreconditionError("FieldBuilder: size mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i]))
      throw NumericalFailure("non-finite state in cell " + std::to_string(i));
  return ScalarField(ScalarField::Unchecked{}, grid_, std::move(values_));
}

void Trajectory::append(double t, ScalarField field) {
  if (!(field.grid() == grid_)) throw PreconditionError("Trajectory: snapshot on a different grid");
  if (times_.empty()) {
    if (t != 0.0) throw PreconditionError("Trajectory: first time must be 0");
  } else if (!(t > times_.back())) {
    throw PreconditionError("Trajectory: times must be strictly increasing");
  }
  times_.push_back(t);
  fields_.push_back(std::move(field));
}

}  // namespace sclaw
