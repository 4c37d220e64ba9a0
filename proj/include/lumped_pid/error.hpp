#pragma once

#include <stdexcept>
#include <string>

namespace lumped_pid {

enum class ErrorKind {
  kInvalidConfig,
  kDimensionMismatch,
  kOrderMismatch,
  kPoleHit,
  kNonFinite,
  kDiverged,
  kSingularity,
  kDegenerateThrust,
  kGimbalDegenerate,
  kSteeringLimit,
  kAmbiguousMatch,
  kOffPath,
  kWindowTooShort,
  kEmptyTrace,
  kNotSkew,
  kParse,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; the kind lets callers (CLI exit
// codes, sweep cell status) branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lumped_pid
