#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ngas {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on caller-supplied data was violated.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite value; the run cannot continue.
class NumericFault : public Error {
 public:
  using Error::Error;
};

/// The density estimator hit a zero k-distance.
class SingularEstimate : public Error {
 public:
  SingularEstimate(const std::string& what, std::size_t unit)
      : Error(what), unit_(unit) {}
  explicit SingularEstimate(const std::string& what) : Error(what) {}

  std::size_t unit() const { return unit_; }

 private:
  std::size_t unit_ = static_cast<std::size_t>(-1);
};

/// A codebook is too degenerate to classify (e.g. all units coincide).
class DegenerateConfiguration : public Error {
 public:
  using Error::Error;
};

/// The signal source ran dry before the schedule finished.
class SignalExhausted : public Error {
 public:
  SignalExhausted(std::uint64_t step, std::uint64_t total)
      : Error("signal source exhausted at step " + std::to_string(step) +
              " of " + std::to_string(total)),
        step_(step) {}

  std::uint64_t step() const { return step_; }

 private:
  std::uint64_t step_;
};

/// Malformed file content. line() is 1-based, 0 when not line-specific.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ngas
