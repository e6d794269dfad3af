#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sclaw {

/// Invalid or incomplete configuration. The message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated an operation's documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// CFL violation, NaN/Inf state, or another numerical breakdown.
class NumericalFailure : public std::runtime_error {
 public:
  static constexpr std::int64_t kNoPath = -1;

  explicit NumericalFailure(const std::string& what, std::int64_t path = kNoPath,
                            std::int64_t step = -1)
      : std::runtime_error(what), path_(path), step_(step) {}

  std::int64_t path() const noexcept { return path_; }
  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t path_;
  std::int64_t step_;
};

}  // namespace sclaw
