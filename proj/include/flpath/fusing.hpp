#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "flpath/fixed_lambda.hpp"

namespace flpath {

/// n-bit encoding of which adjacent variables share a value: bit 0 is 1 and
/// each later bit repeats its predecessor exactly when the two solution
/// entries are equal. Two solutions have the same fused groups iff the
/// arrays are bitwise equal.
struct GroupArray {
  std::vector<std::uint8_t> bits;

  friend bool operator==(const GroupArray&, const GroupArray&) = default;

  [[nodiscard]] int group_count() const {
    int runs = bits.empty() ? 0 : 1;
    for (std::size_t i = 1; i < bits.size(); ++i) runs += bits[i] != bits[i - 1];
    return runs;
  }

  /// True when all of [node_lo, node_hi] lie in one fused group.
  [[nodiscard]] bool fused_together(int node_lo, int node_hi) const {
    for (int i = node_lo + 1; i <= node_hi; ++i)
      if (bits[static_cast<std::size_t>(i)] != bits[static_cast<std::size_t>(i - 1)]) return false;
    return true;
  }
};

inline GroupArray compute_group(std::span<const Rational> solution) {
  GroupArray g;
  g.bits.resize(solution.size());
  g.bits[0] = 1;
  for (std::size_t i = 1; i < solution.size(); ++i)
    g.bits[i] = solution[i] == solution[i - 1] ? g.bits[i - 1] : static_cast<std::uint8_t>(1 - g.bits[i - 1]);
  return g;
}

/// A lambda at which all variables are provably fused: any solution with a
/// nonzero coupling term then costs more than the all-equal feasible point,
/// because adjacent distinct values differ by at least the minimum positive
/// breakpoint gap. Returns 1 when no two distinct breakpoint values exist
/// (such an instance fuses trivially).
inline std::int64_t lambda_max(const ProblemInstance& inst) {
  Rational numerator(0);
  for (const ConvexPwl& f : inst.losses()) numerator += evaluate(f, Rational(0)) - min_value(f);

  const auto index = inst.global_index();
  bool have_gap = false;
  Rational min_gap(0);
  for (std::size_t k = 1; k < index.size(); ++k) {
    const Rational gap = index[k].value - index[k - 1].value;
    if (gap.is_zero()) continue;
    if (!have_gap || gap < min_gap) {
      min_gap = gap;
      have_gap = true;
    }
  }
  if (!have_gap) return 1;
  return (numerator / min_gap).ceil() + 1;
}

struct FusingEntry {
  std::int64_t lambda = 0;
  GroupArray group;
};

/// Sorted fusing lambda values with their group arrays; entry 0 is always
/// lambda = 0. Each later entry's lambda is the first integer at which its
/// group appears, and groups only coarsen along the list.
struct FusingSchedule {
  std::vector<FusingEntry> entries;

  [[nodiscard]] int fusing_value_count() const { return static_cast<int>(entries.size()) - 1; }
};

/// Optional instrumentation for the binary search.
struct FusingSearchStats {
  long fixed_lambda_solves = 0;
};

namespace detail {

using CandidateMap = std::map<std::int64_t, GroupArray>;

inline GroupArray solve_group(const ProblemInstance& inst, std::int64_t lambda,
                              FusingSearchStats* stats) {
  if (stats != nullptr) ++stats->fixed_lambda_solves;
  const std::vector<Rational> solution = solve_fixed_lambda(inst, lambda);
  return compute_group(solution);
}

}  // namespace detail

/// Recursive bisection over [lambda_lo, lambda_hi]. The midpoint group
/// either differs from both ends (a new candidate; both halves continue),
/// matches the low end (only the upper half continues), or matches the high
/// end (the high candidate's key is lowered to the midpoint and the lower
/// half continues). Candidates end up keyed at exact fusing values.
inline void search_fusing_values(const ProblemInstance& inst, std::int64_t lambda_lo,
                                 const GroupArray& group_lo, std::int64_t lambda_hi,
                                 const GroupArray& group_hi, detail::CandidateMap& acc,
                                 FusingSearchStats* stats = nullptr) {
  if (lambda_hi - lambda_lo <= 1) return;
  if (group_lo == group_hi) return;
  const std::int64_t lambda_mid = (lambda_lo + lambda_hi) / 2;
  GroupArray group_mid = detail::solve_group(inst, lambda_mid, stats);
  if (group_mid != group_lo && group_mid != group_hi) {
    acc.emplace(lambda_mid, group_mid);
    search_fusing_values(inst, lambda_lo, group_lo, lambda_mid, group_mid, acc, stats);
    search_fusing_values(inst, lambda_mid, group_mid, lambda_hi, group_hi, acc, stats);
  } else if (group_mid == group_lo) {
    search_fusing_values(inst, lambda_mid, group_mid, lambda_hi, group_hi, acc, stats);
  } else {
    auto node = acc.extract(lambda_hi);
    node.key() = lambda_mid;
    acc.insert(std::move(node));
    search_fusing_values(inst, lambda_lo, group_lo, lambda_mid, group_mid, acc, stats);
  }
}

/// Seeds the candidate map with lambda = 0 and lambda_max, bisects, and
/// returns the sorted schedule. Every entry with lambda > 0 is a true fusing
/// value: its group differs from the group at lambda - 1.
inline FusingSchedule find_all_fusing_values(const ProblemInstance& inst,
                                             FusingSearchStats* stats = nullptr) {
  detail::CandidateMap acc;
  GroupArray group_zero = detail::solve_group(inst, 0, stats);
  acc.emplace(0, group_zero);
  const std::int64_t hi = lambda_max(inst);
  GroupArray group_hi = detail::solve_group(inst, hi, stats);
  if (group_hi != group_zero) {
    acc.emplace(hi, group_hi);
    search_fusing_values(inst, 0, group_zero, hi, group_hi, acc, stats);
  }
  FusingSchedule schedule;
  schedule.entries.reserve(acc.size());
  for (auto& [lambda, group] : acc) schedule.entries.push_back({lambda, std::move(group)});
  return schedule;
}

}  // namespace flpath
