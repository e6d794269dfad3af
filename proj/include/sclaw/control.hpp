#pragma once

#include <vector>

namespace sclaw {

/// Piecewise-constant control h_k(t) on B uniform bins of [0,1], K modes.
class Control {
 public:
  Control(int modes, int bins);
  Control(int modes, int bins, std::vector<double> values);
  static Control constant(int modes, int bins, double value);

  int modes() const noexcept { return modes_; }
  int bins() const noexcept { return bins_; }
  double& at(int mode, int bin) { return values_[static_cast<std::size_t>(mode) * bins_ + bin]; }
  double at(int mode, int bin) const { return values_[static_cast<std::size_t>(mode) * bins_ + bin]; }
  /// Bin containing t, with t = 1 mapped to the last bin.
  int bin_of(double t) const noexcept;

  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  /// Same control on 2B bins (each bin split in two).
  Control refined() const;

 private:
  int modes_;
  int bins_;
  std::vector<double> values_;
};

}  // namespace sclaw
