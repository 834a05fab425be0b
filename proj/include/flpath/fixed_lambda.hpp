#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "flpath/instance.hpp"

namespace flpath {

enum class NodeStatus : unsigned char { source, sink };

/// State of the parametric-cut breakpoint scan for one fixed lambda.
/// Capacities: cap_source(i) = max{0, -w'} and cap_sink(i) = max{0, w'} for
/// the current right sub-gradient w' of node i's loss, so one of the two is
/// always zero. A node's status flips from source to sink at most once per
/// scan (nested cut property) and its assigned value is the breakpoint at
/// which it flips.
struct CutState {
  std::int64_t lambda = 0;
  std::vector<NodeStatus> status;
  std::vector<Rational> cap_source;
  std::vector<Rational> cap_sink;
  std::vector<std::optional<Rational>> assigned_value;
  int sink_count = 0;
};

/// All nodes start in the source set with cap_source(i) = -w_{i,0} (> 0 by
/// coercivity) and zero sink capacity.
inline CutState init_cut_state(const ProblemInstance& inst, std::int64_t lambda) {
  const int n = inst.node_count();
  CutState state;
  state.lambda = lambda;
  state.status.assign(static_cast<std::size_t>(n), NodeStatus::source);
  state.cap_source.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) state.cap_source.push_back(-inst.loss(i).slopes.front());
  state.cap_sink.assign(static_cast<std::size_t>(n), Rational(0));
  state.assigned_value.assign(static_cast<std::size_t>(n), std::nullopt);
  return state;
}

/// Crossing breakpoint k moves the owner's right sub-gradient from
/// slope_before to slope_after; only that node's source/sink capacities
/// change.
inline void apply_breakpoint(CutState& state, int k, const ProblemInstance& inst) {
  const BreakpointRef& bp = inst.breakpoint(k);
  const std::size_t i = static_cast<std::size_t>(bp.node);
  const Rational& w = bp.slope_after;
  state.cap_source[i] = w.is_negative() ? -w : Rational(0);
  state.cap_sink[i] = w.is_negative() ? Rational(0) : w;
}

/// Cut-capacity change of moving the interval [l, r] of source nodes to the
/// sink side: sum of (cap_source - cap_sink) over the interval, plus lambda
/// per adjacent source neighbor, minus lambda per adjacent sink neighbor
/// (path boundary counts as neither).
///
/// Returns the interval around `node` that minimizes this delta among all
/// sub-intervals of the maximal source run containing `node`, provided the
/// minimum is strictly negative; ties prefer the smaller interval, which is
/// the unique minimal minimizer and preserves the maximal source set.
/// Returns nullopt when `node` is already a sink node or no strictly
/// improving interval exists.
inline std::optional<std::pair<int, int>> best_shift_interval(const CutState& state, int node) {
  const int n = static_cast<int>(state.status.size());
  if (state.status[static_cast<std::size_t>(node)] == NodeStatus::sink) return std::nullopt;

  int run_lo = node;
  while (run_lo > 0 && state.status[static_cast<std::size_t>(run_lo - 1)] == NodeStatus::source)
    --run_lo;
  int run_hi = node;
  while (run_hi + 1 < n && state.status[static_cast<std::size_t>(run_hi + 1)] == NodeStatus::source)
    ++run_hi;

  const Rational lambda(state.lambda);
  const auto delta_at = [&](int i) {
    return state.cap_source[static_cast<std::size_t>(i)] - state.cap_sink[static_cast<std::size_t>(i)];
  };
  // Neighbor term for the left end l: +lambda while a source neighbor
  // remains inside the run, -lambda when the run border faces a sink node,
  // zero at the path boundary. Symmetric on the right.
  const auto left_term = [&](int l) {
    if (l > run_lo) return lambda;
    return run_lo > 0 ? -lambda : Rational(0);
  };
  const auto right_term = [&](int r) {
    if (r < run_hi) return lambda;
    return run_hi + 1 < n ? -lambda : Rational(0);
  };

  // Delta(l, r) = sum_{l..node} + sum_{node+1..r} + lambda terms, so the two
  // ends minimize independently; tie rules (larger l, smaller r) pick the
  // unique smallest minimizing interval.
  Rational acc = delta_at(node);
  Rational best_left = acc + left_term(node);
  int best_l = node;
  for (int l = node - 1; l >= run_lo; --l) {
    acc += delta_at(l);
    const Rational cand = acc + left_term(l);
    if (cand < best_left) {
      best_left = cand;
      best_l = l;
    }
  }
  acc = Rational(0);
  Rational best_right = right_term(node);
  int best_r = node;
  for (int r = node + 1; r <= run_hi; ++r) {
    acc += delta_at(r);
    const Rational cand = acc + right_term(r);
    if (cand < best_right) {
      best_right = cand;
      best_r = r;
    }
  }

  if (best_left + best_right < Rational(0)) return std::make_pair(best_l, best_r);
  return std::nullopt;
}

/// Ascending breakpoint scan; each node's optimum is the breakpoint at
/// which it leaves the (maximal) source set, so the result is the
/// componentwise-maximal optimal solution.
inline std::vector<Rational> solve_fixed_lambda(const ProblemInstance& inst, std::int64_t lambda) {
  CutState state = init_cut_state(inst, lambda);
  const int q = inst.breakpoint_count();
  for (int k = 0; k < q; ++k) {
    apply_breakpoint(state, k, inst);
    const BreakpointRef& bp = inst.breakpoint(k);
    if (const auto shift = best_shift_interval(state, bp.node)) {
      for (int i = shift->first; i <= shift->second; ++i) {
        state.status[static_cast<std::size_t>(i)] = NodeStatus::sink;
        state.assigned_value[static_cast<std::size_t>(i)] = bp.value;
        ++state.sink_count;
      }
    }
  }
  if (state.sink_count != inst.node_count())
    throw UnassignedNode("solve_fixed_lambda: node left unassigned after the scan");
  std::vector<Rational> solution;
  solution.reserve(state.assigned_value.size());
  for (const auto& v : state.assigned_value) solution.push_back(*v);
  return solution;
}

}  // namespace flpath
