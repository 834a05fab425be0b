#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "flpath/pwl.hpp"

namespace flpath {

/// One entry of the global breakpoint index: the k-th smallest breakpoint
/// over all losses, the node owning it, and the slopes on its two sides.
struct BreakpointRef {
  Rational value;
  int node = 0;
  Rational slope_before;
  Rational slope_after;
};

/// A chain of n convex piecewise-linear losses plus the sorted union of all
/// their breakpoints. Coincident breakpoints of different nodes stay as
/// distinct index entries, ordered by value then by owner node, so the scan
/// visits each slope change once. Immutable after construction; distinct
/// solver runs may share one instance.
class ProblemInstance {
 public:
  explicit ProblemInstance(std::vector<ConvexPwl> losses) : losses_(std::move(losses)) {
    if (losses_.empty()) throw InvalidPwl("ProblemInstance: need at least one loss");
    for (std::size_t i = 0; i < losses_.size(); ++i) {
      const ConvexPwl& f = losses_[i];
      for (std::size_t k = 0; k < f.breakpoints.size(); ++k)
        index_.push_back({f.breakpoints[k], static_cast<int>(i), f.slopes[k], f.slopes[k + 1]});
    }
    std::sort(index_.begin(), index_.end(), [](const BreakpointRef& a, const BreakpointRef& b) {
      if (a.value != b.value) return a.value < b.value;
      return a.node < b.node;
    });
    neg_first_slope_prefix_.resize(losses_.size() + 1);
    neg_first_slope_prefix_[0] = Rational(0);
    for (std::size_t i = 0; i < losses_.size(); ++i)
      neg_first_slope_prefix_[i + 1] = neg_first_slope_prefix_[i] - losses_[i].slopes.front();
  }

  [[nodiscard]] int node_count() const { return static_cast<int>(losses_.size()); }
  [[nodiscard]] int breakpoint_count() const { return static_cast<int>(index_.size()); }
  [[nodiscard]] const ConvexPwl& loss(int i) const { return losses_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] std::span<const ConvexPwl> losses() const { return losses_; }
  [[nodiscard]] std::span<const BreakpointRef> global_index() const { return index_; }
  [[nodiscard]] const BreakpointRef& breakpoint(int k) const {
    return index_[static_cast<std::size_t>(k)];
  }

  /// Sum of -w_{i,0} over nodes in [node_lo, node_hi], via the global
  /// partial-sum array, in O(1).
  [[nodiscard]] Rational negated_first_slope_sum(int node_lo, int node_hi) const {
    return neg_first_slope_prefix_[static_cast<std::size_t>(node_hi) + 1] -
           neg_first_slope_prefix_[static_cast<std::size_t>(node_lo)];
  }

  /// Fidelity-plus-coupling objective at x for a given integer lambda.
  [[nodiscard]] Rational objective(std::span<const Rational> x, std::int64_t lambda) const {
    Rational total(0);
    for (std::size_t i = 0; i < losses_.size(); ++i) total += evaluate(losses_[i], x[i]);
    for (std::size_t i = 0; i + 1 < losses_.size(); ++i)
      total += Rational(lambda) * (x[i] - x[i + 1]).abs();
    return total;
  }

 private:
  std::vector<ConvexPwl> losses_;
  std::vector<BreakpointRef> index_;
  std::vector<Rational> neg_first_slope_prefix_;
};

}  // namespace flpath
