#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>

namespace sclaw {

/// Neumaier-compensated accumulator. Order of additions still matters for
/// bitwise results, so reductions feed it in a fixed index order.
class NeumaierSum {
 public:
  NeumaierSum& operator+=(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs) noexcept;

/// Fixed-order Gauss-Legendre rule on [-1, 1].
struct GaussLegendre10 {
  static constexpr std::array<double, 10> nodes = {
      -0.9739065285171717, -0.8650633666889845, -0.6794095682990244, -0.4333953941292472,
      -0.1488743389816312, 0.1488743389816312,  0.4333953941292472,  0.6794095682990244,
      0.8650633666889845,  0.9739065285171717};
  static constexpr std::array<double, 10> weights = {
      0.0666713443086881, 0.1494513491505806, 0.2190863625159820, 0.2692667193099963,
      0.2955242247147529, 0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
      0.1494513491505806, 0.0666713443086881};
};

/// Composite 10-point Gauss-Legendre over [a, b] with `panels` equal panels.
double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels = 1);

template <class F>
double gauss_legendre_t(F&& f, double a, double b, int panels = 1) {
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    double s = 0.0;
    for (std::size_t i = 0; i < GaussLegendre10::nodes.size(); ++i)
      s += GaussLegendre10::weights[i] * f(mid + 0.5 * h * GaussLegendre10::nodes[i]);
    total += 0.5 * h * s;
  }
  return total;
}

}  // namespace sclaw
