#pragma once

#include <stdexcept>
#include <string>

namespace flpath {

/// A breakpoint or slope list violates the convex piecewise-linear invariants.
struct InvalidPwl : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// First slope is not negative or last slope is not positive.
struct NotCoercive : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Non-positive grid step passed to the linearizer.
struct InvalidEps : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A node survived the full breakpoint scan in the source set. Unreachable
/// for coercive inputs; signals a validation gap.
struct UnassignedNode : std::logic_error {
  using std::logic_error::logic_error;
};

/// An interval insertion intersected an existing tree interval. Must be
/// unreachable; signals a scan bug.
struct OverlappingInsert : std::logic_error {
  using std::logic_error::logic_error;
};

/// Some lambda in a segment resolved to no value after the scan. Must be
/// unreachable; signals a scan bug.
struct UncoveredLambda : std::logic_error {
  using std::logic_error::logic_error;
};

/// Instance exceeds the size limits of an exhaustive oracle mode.
struct TooLarge : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Malformed instance or path document. The message carries the location.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace flpath
