#pragma once

#include <stdexcept>
#include <string>

namespace dyson {

// Error taxonomy. Every failure mode that callers are expected to branch on
// gets its own type; all of them derive from std::runtime_error so the CLI
// can still catch everything in one place.

struct DuplicatePoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyRestriction : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidAlpha : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotInSupport : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivisionGuard : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CollisionBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EigensolverNoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureOrderTooLow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ContourTooClose : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WeightBlowup : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientCounts : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientPaths : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Configuration-file problems carry the offending field path.
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string field_path, const std::string& reason)
      : std::runtime_error(field_path + ": " + reason), field(std::move(field_path)) {}
};

}  // namespace dyson
