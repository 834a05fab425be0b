#pragma once

// Shared fixtures: the two-node |.|-loss instance used throughout the unit
// tests, deterministic random instance generators for property tests, and
// structural checkers for the path invariants (quasi-convexity, breakpoint
// provenance, count bounds).

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "flpath/path.hpp"

namespace flpath::testing {

/// w * |x - a|
inline ConvexPwl abs_loss(Rational a, Rational w) { return make_pwl({a}, {-w, w}); }

/// Two nodes, 2|x-1| and 2|x-3|.
inline ProblemInstance instance_a() {
  return ProblemInstance({abs_loss(1, 2), abs_loss(3, 2)});
}

struct InstanceSpec {
  int n_min = 2, n_max = 5;
  int qi_min = 1, qi_max = 4;
  int coord_lo = -10, coord_hi = 10;
  int slope_start_lo = -6, slope_start_hi = -1;
  int slope_step_hi = 3;
  int offset_lo = -5, offset_hi = 5;
};

inline ConvexPwl random_pwl(std::mt19937_64& rng, const InstanceSpec& spec) {
  std::uniform_int_distribution<int> qi(spec.qi_min, spec.qi_max);
  std::uniform_int_distribution<int> coord(spec.coord_lo, spec.coord_hi);
  std::uniform_int_distribution<int> start(spec.slope_start_lo, spec.slope_start_hi);
  std::uniform_int_distribution<int> step(1, spec.slope_step_hi);
  std::uniform_int_distribution<int> offset(spec.offset_lo, spec.offset_hi);
  const int q = qi(rng);
  for (;;) {
    std::vector<int> bps;
    while (static_cast<int>(bps.size()) < q) {
      const int c = coord(rng);
      bool dup = false;
      for (const int b : bps) dup = dup || b == c;
      if (!dup) bps.push_back(c);
    }
    std::sort(bps.begin(), bps.end());
    std::vector<Rational> breakpoints(bps.begin(), bps.end());
    std::vector<Rational> slopes{Rational(start(rng))};
    for (int t = 0; t < q; ++t) slopes.push_back(slopes.back() + Rational(step(rng)));
    if (!(Rational(0) < slopes.back())) continue;  // resample until coercive
    return make_pwl(std::move(breakpoints), std::move(slopes), Rational(offset(rng)));
  }
}

inline ProblemInstance random_instance(std::mt19937_64& rng, const InstanceSpec& spec = {}) {
  std::uniform_int_distribution<int> nn(spec.n_min, spec.n_max);
  const int n = nn(rng);
  std::vector<ConvexPwl> losses;
  losses.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) losses.push_back(random_pwl(rng, spec));
  return ProblemInstance(std::move(losses));
}

/// Value sequence of one super-node over its segment with equal adjacent
/// values merged (the maximal lambda-constant pieces).
inline std::vector<Rational> merged_values(const IntervalValueMap& tree) {
  std::vector<Rational> values;
  for (const auto& entry : tree.entries())
    if (values.empty() || !(values.back() == entry.value)) values.push_back(entry.value);
  return values;
}

/// Monotone decrease, monotone increase, or decrease-then-increase.
inline bool is_valley(const std::vector<Rational>& values) {
  std::size_t t = 1;
  while (t < values.size() && values[t] < values[t - 1]) ++t;
  while (t < values.size() && values[t - 1] < values[t]) ++t;
  return t >= values.size();
}

/// Every recorded lambda-breakpoint must reproduce from its smt snapshot:
/// the fence sits at floor(smt/2) for left ends and ceil(tms/2)-1 for right
/// ends (halving removed at the edges; both agree with the generic
/// ceil(smt/2)/floor(tms/2) forms off exact ties). Every interior fence of
/// the finished trees must trace back to some recorded event. Returns an
/// explanation on failure.
inline bool provenance_consistent(const ReducedProblem& rp, const ReducedPathScan& scan,
                                  std::string* why = nullptr) {
  std::vector<std::int64_t> event_fences;
  for (const BreakpointProvenance& event : scan.provenance) {
    const Rational half(event.edge ? 1 : 2);
    std::int64_t expected = 0;
    if (event.kind == BreakpointProvenance::Kind::from_smt) {
      if (event.smt_at_event.is_negative()) {
        if (why != nullptr) *why = "from_smt event with negative smt";
        return false;
      }
      expected = (event.smt_at_event / half).floor();
    } else {
      if (!event.smt_at_event.is_negative()) {
        if (why != nullptr) *why = "from_tms event with nonnegative smt";
        return false;
      }
      expected = ((-event.smt_at_event) / half).ceil() - 1;
    }
    if (event.fence != expected) {
      if (why != nullptr)
        *why = "event fence " + std::to_string(event.fence) + " != expected " +
               std::to_string(expected);
      return false;
    }
    event_fences.push_back(event.fence);
  }
  std::sort(event_fences.begin(), event_fences.end());
  for (const std::int64_t fence : lambda_breakpoint_fences(rp, scan)) {
    if (!std::binary_search(event_fences.begin(), event_fences.end(), fence)) {
      if (why != nullptr) *why = "fence " + std::to_string(fence) + " has no recorded event";
      return false;
    }
  }
  return true;
}

}  // namespace flpath::testing
