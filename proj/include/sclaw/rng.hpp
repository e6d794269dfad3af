#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace sclaw {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Stateless: output is a pure function of (counter, key).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

/// Identifies one independent family of paths. Distinct streams under the
/// same seed never share increments.
enum class Stream : std::uint32_t { primary = 0, scaling_base = 1, scaling_scaled = 2 };

/// Standard normal draw keyed by (seed, stream, path, step, mode).
double keyed_gaussian(std::uint64_t seed, Stream stream, std::uint32_t path, std::uint32_t step,
                      std::uint32_t mode) noexcept;

/// Brownian increments Δβ_k(step) ~ N(0, dt) for one path. Any increment can be
/// regenerated in isolation, independent of evaluation order.
class NoisePath {
 public:
  NoisePath(std::uint64_t seed, Stream stream, std::uint32_t path_index, double dt);

  double increment(std::uint32_t step, std::uint32_t mode) const noexcept;
  void fill(std::uint32_t step, std::span<double> out) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint32_t path_index() const noexcept { return path_; }
  double dt() const noexcept { return dt_; }

 private:
  std::uint64_t seed_;
  Stream stream_;
  std::uint32_t path_;
  double dt_;
  double sqrt_dt_;
};

}  // namespace sclaw
