#include "sclaw/numerics.hpp"

namespace sclaw {

double compensated_sum(std::span<const double> xs) noexcept {
  NeumaierSum s;
  for (double x : xs) s += x;
  return s.value();
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels) {
  return gauss_legendre_t(f, a, b, panels);
}

}  // namespace sclaw
