#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "flpath/path.hpp"

namespace flpath::oracle {

/// Ground-truth engines, independent of the parametric-cut scan. Optimal
/// values can be restricted to the breakpoint grid (the path is piecewise
/// constant with values from the breakpoint set), so exhaustive grid
/// enumeration and an exact chain DP both produce certified optima.
enum class Mode { full_enumeration, objective_only };

struct FixedResult {
  Rational objective;
  std::vector<Rational> solution;  // componentwise-maximal optimal solution
  long optimal_count = 0;          // enumeration mode only: grid-optimal set size
};

inline std::vector<Rational> distinct_breakpoint_values(const ProblemInstance& inst) {
  std::vector<Rational> grid;
  grid.reserve(static_cast<std::size_t>(inst.breakpoint_count()));
  for (const BreakpointRef& bp : inst.global_index())
    if (grid.empty() || !(grid.back() == bp.value)) grid.push_back(bp.value);
  return grid;
}

/// Exact chain DP over an arbitrary per-node cost on a shared value grid,
/// with coupling cost lambda * |x_i - x_{i+1}|. The min-coupling transform
/// runs in O(g) per node via left/right passes. The backtrack breaks every
/// tie toward the larger grid value, which yields the componentwise maximum
/// of the optimal set: the optimal set is closed under componentwise max
/// (separable convex terms are modular, absolute differences submodular),
/// and a right-to-left greedy over exact prefix minima then reproduces the
/// maximal element coordinate by coordinate.
struct ChainDpResult {
  Rational objective;
  std::vector<Rational> solution;
};

inline ChainDpResult chain_dp_min(std::span<const Rational> grid,
                                  const std::function<Rational(int, const Rational&)>& cost,
                                  int node_count, std::int64_t lambda) {
  const std::size_t g = grid.size();
  const Rational lam(lambda);
  std::vector<std::vector<Rational>> rows(static_cast<std::size_t>(node_count),
                                          std::vector<Rational>(g));
  for (std::size_t t = 0; t < g; ++t) rows[0][t] = cost(0, grid[t]);
  std::vector<Rational> reach(g);
  for (int i = 1; i < node_count; ++i) {
    const auto& prev = rows[static_cast<std::size_t>(i) - 1];
    reach[0] = prev[0];
    for (std::size_t t = 1; t < g; ++t)
      reach[t] = std::min(prev[t], reach[t - 1] + lam * (grid[t] - grid[t - 1]));
    Rational from_right = prev[g - 1];
    for (std::size_t t = g; t-- > 0;) {
      if (t + 1 < g) from_right = std::min(prev[t], from_right + lam * (grid[t + 1] - grid[t]));
      if (from_right < reach[t]) reach[t] = from_right;
    }
    auto& row = rows[static_cast<std::size_t>(i)];
    for (std::size_t t = 0; t < g; ++t) row[t] = cost(i, grid[t]) + reach[t];
  }

  const auto& last = rows[static_cast<std::size_t>(node_count) - 1];
  std::size_t pick = 0;
  for (std::size_t t = 1; t < g; ++t)
    if (!(last[pick] < last[t])) pick = t;  // ties go right

  ChainDpResult result;
  result.objective = last[pick];
  result.solution.assign(static_cast<std::size_t>(node_count), Rational(0));
  result.solution[static_cast<std::size_t>(node_count) - 1] = grid[pick];
  for (int i = node_count - 2; i >= 0; --i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    const Rational& anchor = result.solution[static_cast<std::size_t>(i) + 1];
    std::size_t best = 0;
    Rational best_cost = row[0] + lam * (grid[0] - anchor).abs();
    for (std::size_t t = 1; t < g; ++t) {
      const Rational c = row[t] + lam * (grid[t] - anchor).abs();
      if (!(best_cost < c)) {
        best_cost = c;
        best = t;
      }
    }
    result.solution[static_cast<std::size_t>(i)] = grid[best];
  }
  return result;
}

/// Exhaustive minimization over the breakpoint grid.
///
/// full_enumeration (n <= 5, q <= 10): visits every grid assignment, returns
/// the componentwise maximum of the optimal set and asserts that this
/// maximum is itself optimal (lattice sanity check).
///
/// objective_only: exact chain DP in O(n q^2) worst case; its solution is
/// the componentwise-maximal optimum via the max-biased backtrack.
inline FixedResult brute_force_fixed(const ProblemInstance& inst, std::int64_t lambda,
                                     Mode mode) {
  const std::vector<Rational> grid = distinct_breakpoint_values(inst);
  const int n = inst.node_count();
  if (mode == Mode::objective_only) {
    ChainDpResult dp = chain_dp_min(
        grid, [&](int i, const Rational& x) { return evaluate(inst.loss(i), x); }, n, lambda);
    return {dp.objective, std::move(dp.solution), 0};
  }

  if (n > 5 || inst.breakpoint_count() > 10)
    throw TooLarge("brute_force_fixed: full enumeration limited to n <= 5, q <= 10");

  const std::size_t g = grid.size();
  std::vector<std::size_t> odo(static_cast<std::size_t>(n), 0);
  std::vector<Rational> x(static_cast<std::size_t>(n));
  bool have_best = false;
  Rational best_objective(0);
  std::vector<std::vector<std::size_t>> argmins;
  for (;;) {
    for (std::size_t i = 0; i < odo.size(); ++i) x[i] = grid[odo[i]];
    const Rational obj = inst.objective(x, lambda);
    if (!have_best || obj < best_objective) {
      best_objective = obj;
      argmins.clear();
      argmins.push_back(odo);
      have_best = true;
    } else if (obj == best_objective) {
      argmins.push_back(odo);
    }
    std::size_t pos = 0;
    while (pos < odo.size() && ++odo[pos] == g) {
      odo[pos] = 0;
      ++pos;
    }
    if (pos == odo.size()) break;
  }

  std::vector<std::size_t> maximal(static_cast<std::size_t>(n), 0);
  for (const auto& a : argmins)
    for (std::size_t i = 0; i < a.size(); ++i) maximal[i] = std::max(maximal[i], a[i]);
  FixedResult result;
  result.optimal_count = static_cast<long>(argmins.size());
  result.solution.reserve(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < maximal.size(); ++i) result.solution.push_back(grid[maximal[i]]);
  result.objective = best_objective;
  if (!(inst.objective(result.solution, lambda) == best_objective))
    throw std::logic_error(
        "brute_force_fixed: componentwise max of the optimal set is not optimal");
  return result;
}

struct SweepEntry {
  std::int64_t lambda = 0;
  Rational objective;
  std::vector<Rational> solution;
  GroupArray group;
};

struct PathMismatch {
  std::int64_t lambda = 0;
  int node = 0;  // -1 marks an objective mismatch
};

struct OracleReport {
  std::vector<SweepEntry> entries;
  std::vector<std::int64_t> fusing_events;  // lambda where the group changed
  std::vector<PathMismatch> mismatches;
};

/// Ground truth for every integer lambda in [0, lambda_hi].
inline OracleReport sweep(const ProblemInstance& inst, std::int64_t lambda_hi,
                          Mode mode = Mode::objective_only) {
  OracleReport report;
  report.entries.reserve(static_cast<std::size_t>(lambda_hi) + 1);
  for (std::int64_t lambda = 0; lambda <= lambda_hi; ++lambda) {
    FixedResult r = brute_force_fixed(inst, lambda, mode);
    SweepEntry entry{lambda, r.objective, std::move(r.solution), {}};
    entry.group = compute_group(entry.solution);
    if (lambda > 0 && !(entry.group == report.entries.back().group))
      report.fusing_events.push_back(lambda);
    report.entries.push_back(std::move(entry));
  }
  return report;
}

/// Compares eval_path against a sweep baseline: componentwise in
/// full_enumeration mode, by objective value in objective_only mode.
inline OracleReport verify_path(const SolutionPath& path, const ProblemInstance& inst,
                                OracleReport baseline, Mode mode) {
  baseline.mismatches.clear();
  for (const SweepEntry& entry : baseline.entries) {
    const std::vector<Rational> x = eval_path(path, entry.lambda);
    if (mode == Mode::full_enumeration) {
      for (int i = 0; i < inst.node_count(); ++i)
        if (!(x[static_cast<std::size_t>(i)] == entry.solution[static_cast<std::size_t>(i)]))
          baseline.mismatches.push_back({entry.lambda, i});
    } else {
      if (!(inst.objective(x, entry.lambda) == entry.objective))
        baseline.mismatches.push_back({entry.lambda, -1});
    }
  }
  return baseline;
}

}  // namespace flpath::oracle
