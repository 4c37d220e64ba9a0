#include "lumped_pid/error.hpp"

namespace lumped_pid {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidConfig: return "invalid-config";
    case ErrorKind::kDimensionMismatch: return "dimension-mismatch";
    case ErrorKind::kOrderMismatch: return "order-mismatch";
    case ErrorKind::kPoleHit: return "pole-hit";
    case ErrorKind::kNonFinite: return "non-finite";
    case ErrorKind::kDiverged: return "diverged";
    case ErrorKind::kSingularity: return "singularity";
    case ErrorKind::kDegenerateThrust: return "degenerate-thrust";
    case ErrorKind::kGimbalDegenerate: return "gimbal-degenerate";
    case ErrorKind::kSteeringLimit: return "steering-limit";
    case ErrorKind::kAmbiguousMatch: return "ambiguous-match";
    case ErrorKind::kOffPath: return "off-path";
    case ErrorKind::kWindowTooShort: return "window-too-short";
    case ErrorKind::kEmptyTrace: return "empty-trace";
    case ErrorKind::kNotSkew: return "not-skew";
    case ErrorKind::kParse: return "parse";
  }
  return "unknown";
}

}  // namespace lumped_pid
