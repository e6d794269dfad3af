#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace sclaw {

/// Uniform periodic grid on the unit torus T = [0,1).
class TorusGrid {
 public:
  explicit TorusGrid(int cells);

  int cells() const noexcept { return cells_; }
  double dx() const noexcept { return dx_; }
  double center(int i) const noexcept { return (i + 0.5) * dx_; }
  double left_edge(int i) const noexcept { return i * dx_; }

  /// Index modulo M, valid for any integer.
  int wrap(int i) const noexcept {
    const int r = i % cells_;
    return r < 0 ? r + cells_ : r;
  }

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  int cells_;
  double dx_;
};

/// Distance on the unit circle, in [0, 1/2].
double torus_distance(double x, double y) noexcept;

/// Cell averages of one scalar state on a TorusGrid. Values are always finite.
class ScalarField {
 public:
  ScalarField(TorusGrid grid, std::vector<double> values);
  static ScalarField constant(TorusGrid grid, double value);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  double min() const;
  double max() const;
  double mean() const;
  /// max |u_i|, the L-infinity bound used for CFL and state-grid sizing.
  double sup_norm() const;

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  friend class FieldBuilder;
  struct Unchecked {};
  ScalarField(Unchecked, TorusGrid grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {}

  TorusGrid grid_;
  std::vector<double> values_;
};

/// Mutable scratch used by solvers; converts back into a checked ScalarField.
class FieldBuilder {
 public:
  explicit FieldBuilder(const ScalarField& f) : grid_(f.grid()), values_(f.values_) {}
  FieldBuilder(TorusGrid grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {}

  std::vector<double>& values() noexcept { return values_; }
  const TorusGrid& grid() const noexcept { return grid_; }
  ScalarField build() &&;

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

/// Time history of a field: strictly increasing times starting at 0, one snapshot each.
class Trajectory {
 public:
  explicit Trajectory(TorusGrid grid) : grid_(grid) {}

  void append(double t, ScalarField field);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::span<const double> times() const noexcept { return times_; }
  std::span<const ScalarField> fields() const noexcept { return fields_; }
  std::size_t size() const noexcept { return times_.size(); }
  const ScalarField& front() const { return fields_.front(); }
  const ScalarField& back() const { return fields_.back(); }
  double horizon() const { return times_.back(); }

 private:
  TorusGrid grid_;
  std::vector<double> times_;
  std::vector<ScalarField> fields_;
};

}  // namespace sclaw
