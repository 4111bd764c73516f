#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chaoslink {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A constructor argument or operation argument violates its contract.
class ParameterError : public Error {
  public:
    using Error::Error;
};

/// Sequence length does not match what an operation requires.
class LengthError : public Error {
  public:
    using Error::Error;
};

/// A drive state left the open basin (0, k).
class BasinEscapeError : public Error {
  public:
    BasinEscapeError(std::size_t step, double value)
        : Error("state left the basin (0, k) at step " + std::to_string(step) +
                " (value " + std::to_string(value) + ")"),
          step_(step), value_(value) {}

    std::size_t step() const noexcept { return step_; }
    double value() const noexcept { return value_; }

  private:
    std::size_t step_;
    double value_;
};

/// The response unit exceeded the configured guard bound.
class DivergenceError : public Error {
  public:
    using Error::Error;
};

/// Malformed or inconsistent scenario configuration.
class ConfigError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

} // namespace chaoslink
