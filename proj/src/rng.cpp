#include "sclaw/rng.hpp"

#include <cmath>
#include <numbers>

#include "sclaw/errors.hpp"

namespace sclaw {

namespace {

constexpr std::uint32_t kW0 = 0x9E3779B9;
constexpr std::uint32_t kW1 = 0xBB67AE85;
constexpr std::uint32_t kM0 = 0xD2511F53;
constexpr std::uint32_t kM1 = 0xCD9E8D57;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

// Uniform in (0, 1] with 53 random bits.
inline double open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kM0, ctr[0], lo0, hi0);
    mulhilo(kM1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

double keyed_gaussian(std::uint64_t seed, Stream stream, std::uint32_t path, std::uint32_t step,
                      std::uint32_t mode) noexcept {
  const PhiloxKey key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const PhiloxCounter ctr{step, mode, path, static_cast<std::uint32_t>(stream)};
  const auto r = philox4x32_10(ctr, key);
  // Box-Muller, cosine branch only.
  const double u1 = open_unit(r[0], r[1]);
  const double u2 = open_unit(r[2], r[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

NoisePath::NoisePath(std::uint64_t seed, Stream stream, std::uint32_t path_index, double dt)
    : seed_(seed), stream_(stream), path_(path_index), dt_(dt), sqrt_dt_(std::sqrt(dt)) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("NoisePath: dt must be positive");
}

double NoisePath::increment(std::uint32_t step, std::uint32_t mode) const noexcept {
  return sqrt_dt_ * keyed_gaussian(seed_, stream_, path_, step, mode);
}

void NoisePath::fill(std::uint32_t step, std::span<double> out) const noexcept {
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = increment(step, static_cast<std::uint32_t>(k));
}

}  // namespace sclaw
