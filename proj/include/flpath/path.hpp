#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "flpath/fusing.hpp"

namespace flpath {

/// Sentinel for an unbounded right endpoint of a lambda interval.
inline constexpr std::int64_t kLambdaInf = std::numeric_limits<std::int64_t>::max();

/// Closed integer interval [lo, hi]; empty when lo > hi.
struct LambdaInterval {
  std::int64_t lo = 0;
  std::int64_t hi = -1;

  [[nodiscard]] bool empty() const { return lo > hi; }
  friend bool operator==(const LambdaInterval&, const LambdaInterval&) = default;
};

/// One reduced problem: the fused super-node structure that is valid on the
/// lambda segment [lambda_lo, lambda_hi]. `to_supernode` maps each original
/// node to its super-node id; it is non-decreasing and constant on each
/// fused group. Super-node losses are never materialized; the scan walks
/// the global breakpoint index through this table instead.
struct ReducedProblem {
  int index = 0;
  std::int64_t lambda_lo = 0;
  std::int64_t lambda_hi = kLambdaInf;  // inclusive; kLambdaInf on the final segment
  int supernode_count = 0;
  std::vector<int> to_supernode;
};

inline ReducedProblem build_reduced_problem(const GroupArray& group, int j, std::int64_t lambda,
                                            std::int64_t next_lambda) {
  ReducedProblem rp;
  rp.index = j;
  rp.lambda_lo = lambda;
  rp.lambda_hi = next_lambda == kLambdaInf ? kLambdaInf : next_lambda - 1;
  rp.to_supernode.resize(group.bits.size());
  int id = 0;
  for (std::size_t i = 1; i < group.bits.size(); ++i) {
    if (group.bits[i] != group.bits[i - 1]) ++id;
    rp.to_supernode[i] = id;
  }
  rp.supernode_count = id + 1;
  return rp;
}

/// Per-super-node smt = c_{s,I} - c_{I,t} at scan start: the sum of negated
/// first slopes of the member nodes, read off the instance's partial-sum
/// array in O(1) per super-node.
inline std::vector<Rational> init_smt(const ReducedProblem& rp, const ProblemInstance& inst) {
  std::vector<Rational> smt(static_cast<std::size_t>(rp.supernode_count));
  const int n = static_cast<int>(rp.to_supernode.size());
  int i = 0;
  for (int I = 0; I < rp.supernode_count; ++I) {
    const int lo = i;
    while (i < n && rp.to_supernode[static_cast<std::size_t>(i)] == I) ++i;
    smt[static_cast<std::size_t>(I)] = inst.negated_first_slope_sum(lo, i - 1);
  }
  return smt;
}

/// Ordered map from disjoint integer intervals to values, keyed by interval
/// order (disjoint intervals compare by their endpoints). Logarithmic insert
/// and point location.
class IntervalValueMap {
 public:
  struct Entry {
    LambdaInterval interval;
    Rational value;
  };

  void insert(const LambdaInterval& intv, const Rational& value) {
    if (intv.empty()) throw OverlappingInsert("IntervalValueMap: refusing empty interval");
    const auto next = map_.lower_bound(intv.lo);
    if (next != map_.begin()) {
      const auto prev = std::prev(next);
      if (prev->second.first >= intv.lo)
        throw OverlappingInsert("IntervalValueMap: interval overlaps predecessor");
    }
    if (next != map_.end() && next->first <= intv.hi)
      throw OverlappingInsert("IntervalValueMap: interval overlaps successor");
    map_.emplace(intv.lo, std::make_pair(intv.hi, value));
  }

  /// Value of the interval containing lambda, or nullptr.
  [[nodiscard]] const Rational* find(std::int64_t lambda) const {
    auto it = map_.upper_bound(lambda);
    if (it == map_.begin()) return nullptr;
    --it;
    if (it->second.first < lambda) return nullptr;
    return &it->second.second;
  }

  [[nodiscard]] std::size_t size() const { return map_.size(); }

  [[nodiscard]] std::vector<Entry> entries() const {
    std::vector<Entry> out;
    out.reserve(map_.size());
    for (const auto& [lo, rest] : map_) out.push_back({{lo, rest.first}, rest.second});
    return out;
  }

 private:
  std::map<std::int64_t, std::pair<std::int64_t, Rational>> map_;
};

/// Where an inserted lambda-breakpoint came from. `fence` identifies the
/// boundary between lambda = fence and fence + 1. from_smt events sit at the
/// left end of an inserted interval (fence = floor(smt/2), halving removed
/// at the edges); from_tms events at the right end (fence = ceil(tms/2)-1).
struct BreakpointProvenance {
  enum class Kind { from_smt, from_tms };

  int step = 0;
  int supernode = 0;
  std::int64_t fence = 0;
  Kind kind = Kind::from_smt;
  Rational smt_at_event;
  bool edge = false;  // edge super-node: threshold halving removed
};

/// Scan state and output for one reduced problem: per-super-node smt values,
/// the growing maximal sink interval, the interval trees of the solution
/// path, the per-step insertion lists (for inverse queries), and breakpoint
/// provenance records.
struct ReducedPathScan {
  std::vector<Rational> smt;
  std::vector<LambdaInterval> sink_intv;
  std::vector<IntervalValueMap> trees;
  std::vector<std::vector<LambdaInterval>> inserted_at_step;
  std::vector<BreakpointProvenance> provenance;
};

namespace detail {

/// Endpoints of a candidate interval that were produced by a threshold
/// (rather than clamped to the segment or copied from a neighbor), for
/// provenance recording.
struct ThresholdMarks {
  std::optional<std::int64_t> left_fence;
  std::optional<std::int64_t> right_fence;
  Rational smt_value;
  bool edge = false;
};

}  // namespace detail

/// Inserts the newly computed maximal sink interval for super-node I:
/// either the whole candidate (first flip) or the left/right extensions
/// beyond the current sink interval, each with value a_k. Extensions are
/// adjacent to the existing sink interval by construction; the tree rejects
/// any overlap.
inline void update_lambda_breakpoint(int I, const LambdaInterval& cand, const Rational& value,
                                     int step, const detail::ThresholdMarks& marks,
                                     ReducedPathScan& scan) {
  if (cand.empty()) return;
  LambdaInterval& sink = scan.sink_intv[static_cast<std::size_t>(I)];
  auto& inserted = scan.inserted_at_step[static_cast<std::size_t>(step)];
  const auto record = [&](std::int64_t fence, BreakpointProvenance::Kind kind) {
    scan.provenance.push_back({step, I, fence, kind, marks.smt_value, marks.edge});
  };
  IntervalValueMap& tree = scan.trees[static_cast<std::size_t>(I)];
  if (sink.empty()) {
    tree.insert(cand, value);
    inserted.push_back(cand);
    sink = cand;
    if (marks.left_fence) record(*marks.left_fence, BreakpointProvenance::Kind::from_smt);
    if (marks.right_fence) record(*marks.right_fence, BreakpointProvenance::Kind::from_tms);
    return;
  }
  if (cand.lo < sink.lo) {
    const LambdaInterval ext{cand.lo, sink.lo - 1};
    tree.insert(ext, value);
    inserted.push_back(ext);
    sink.lo = cand.lo;
    if (marks.left_fence) record(*marks.left_fence, BreakpointProvenance::Kind::from_smt);
  }
  if (cand.hi > sink.hi) {
    const LambdaInterval ext{sink.hi + 1, cand.hi};
    tree.insert(ext, value);
    inserted.push_back(ext);
    sink.hi = cand.hi;
    if (marks.right_fence) record(*marks.right_fence, BreakpointProvenance::Kind::from_tms);
  }
}

/// The per-step candidate sink interval for the super-node hit at step k,
/// after its smt decrement. Interior super-nodes threshold at smt/2 (tms/2);
/// edge super-nodes drop the halving; a lone super-node has no coupling arcs
/// at all and flips for the whole segment once smt < 0.
///
/// The source-to-sink conditions are strict inequalities (lambda > smt/2,
/// lambda < tms/2): at an exact tie the maximal source set keeps the node on
/// the source side. The integer thresholds are therefore floor(smt/2)+1 and
/// ceil(tms/2)-1, which agree with the generic ceil(smt/2) / floor(tms/2)
/// forms whenever the threshold is not an exact integer.
inline void compute_lambda_breakpoint(int I, const ReducedProblem& rp, const Rational& value,
                                      int step, ReducedPathScan& scan) {
  const std::int64_t seg_lo = rp.lambda_lo;
  const std::int64_t seg_hi = rp.lambda_hi;
  const Rational smt = scan.smt[static_cast<std::size_t>(I)];
  const int nj = rp.supernode_count;

  LambdaInterval cand{seg_lo, seg_lo - 1};
  detail::ThresholdMarks marks;
  marks.smt_value = smt;
  marks.edge = I == 0 || I == nj - 1;

  if (nj == 1) {
    if (smt.is_negative()) cand = {seg_lo, seg_hi};
  } else if (I == 0 || I == nj - 1) {
    const std::size_t nb = static_cast<std::size_t>(I == 0 ? 1 : nj - 2);
    if (!smt.is_negative()) {
      if (!scan.sink_intv[nb].empty()) {
        const std::int64_t thr = smt.floor() + 1;  // smallest integer > smt
        cand.lo = std::max(thr, seg_lo);
        cand.hi = scan.sink_intv[nb].hi;
        if (cand.lo == thr && thr > seg_lo) marks.left_fence = thr - 1;
      }
    } else {
      const std::int64_t thr = (-smt).ceil() - 1;  // largest integer < tms
      cand.lo = seg_lo;
      cand.hi = std::max(scan.sink_intv[nb].hi, std::min(thr, seg_hi));
      if (cand.hi == thr && thr != seg_hi) marks.right_fence = thr;
    }
  } else {
    const LambdaInterval& left = scan.sink_intv[static_cast<std::size_t>(I - 1)];
    const LambdaInterval& right = scan.sink_intv[static_cast<std::size_t>(I + 1)];
    if (!smt.is_negative()) {
      if (!left.empty() && !right.empty()) {
        const std::int64_t thr = (smt / Rational(2)).floor() + 1;
        cand.lo = std::max(thr, seg_lo);
        cand.hi = std::min(left.hi, right.hi);
        if (cand.lo == thr && thr > seg_lo) marks.left_fence = thr - 1;
      }
    } else {
      const std::int64_t thr = ((-smt) / Rational(2)).ceil() - 1;
      cand.lo = seg_lo;
      cand.hi = std::max(std::max(left.hi, right.hi), std::min(thr, seg_hi));
      if (cand.hi == thr && thr != seg_hi) marks.right_fence = thr;
    }
  }
  update_lambda_breakpoint(I, cand, value, step, marks, scan);
}

/// One pass over the global breakpoint index for one reduced problem. Each
/// step touches only the super-node owning the breakpoint; afterwards every
/// super-node's tree must cover the whole segment.
inline ReducedPathScan solve_reduced_plfl(const ReducedProblem& rp, const ProblemInstance& inst) {
  const int q = inst.breakpoint_count();
  ReducedPathScan scan;
  scan.smt = init_smt(rp, inst);
  scan.sink_intv.assign(static_cast<std::size_t>(rp.supernode_count),
                        LambdaInterval{rp.lambda_lo, rp.lambda_lo - 1});
  scan.trees.resize(static_cast<std::size_t>(rp.supernode_count));
  scan.inserted_at_step.resize(static_cast<std::size_t>(q));

  for (int k = 0; k < q; ++k) {
    const BreakpointRef& bp = inst.breakpoint(k);
    const int I = rp.to_supernode[static_cast<std::size_t>(bp.node)];
    scan.smt[static_cast<std::size_t>(I)] -= bp.slope_after - bp.slope_before;
    compute_lambda_breakpoint(I, rp, bp.value, k, scan);
  }

  for (int I = 0; I < rp.supernode_count; ++I) {
    const auto entries = scan.trees[static_cast<std::size_t>(I)].entries();
    bool covered = !entries.empty() && entries.front().interval.lo == rp.lambda_lo &&
                   entries.back().interval.hi == rp.lambda_hi;
    for (std::size_t t = 0; covered && t + 1 < entries.size(); ++t)
      covered = entries[t].interval.hi != kLambdaInf &&
                entries[t + 1].interval.lo == entries[t].interval.hi + 1;
    if (!covered)
      throw UncoveredLambda("solve_reduced_plfl: segment not fully covered for a super-node");
  }
  return scan;
}

/// Distinct interior fences (boundaries between consecutive integers) of one
/// segment's trees, the segment's own endpoints excluded. Each of these is a
/// lambda-breakpoint introduced by this reduced problem.
inline std::vector<std::int64_t> lambda_breakpoint_fences(const ReducedProblem& rp,
                                                          const ReducedPathScan& scan) {
  std::vector<std::int64_t> fences;
  for (const IntervalValueMap& tree : scan.trees) {
    for (const auto& entry : tree.entries()) {
      if (entry.interval.lo != rp.lambda_lo) fences.push_back(entry.interval.lo - 1);
      if (entry.interval.hi != rp.lambda_hi && entry.interval.hi != kLambdaInf)
        fences.push_back(entry.interval.hi);
    }
  }
  std::sort(fences.begin(), fences.end());
  fences.erase(std::unique(fences.begin(), fences.end()), fences.end());
  return fences;
}

/// Entry of the serialized global breakpoint list carried by a path, enough
/// to answer queries without the original instance.
struct PathBreakpoint {
  Rational value;
  int node = 0;
};

/// The full regularization path: the fusing schedule plus, per reduced
/// problem, the super-node table and interval trees. The final segment
/// extends to +infinity. Immutable once built; safe for concurrent queries.
struct SolutionPath {
  int node_count = 0;
  std::vector<PathBreakpoint> breakpoints;
  FusingSchedule schedule;
  std::vector<ReducedProblem> problems;
  std::vector<ReducedPathScan> scans;

  /// Largest j whose segment starts at or below lambda.
  [[nodiscard]] int segment_for(std::int64_t lambda) const {
    int lo = 0;
    int hi = static_cast<int>(schedule.entries.size()) - 1;
    while (lo < hi) {
      const int mid = (lo + hi + 1) / 2;
      if (schedule.entries[static_cast<std::size_t>(mid)].lambda <= lambda)
        lo = mid;
      else
        hi = mid - 1;
    }
    return lo;
  }
};

inline SolutionPath solve_full_path(const ProblemInstance& inst,
                                    FusingSearchStats* stats = nullptr) {
  SolutionPath path;
  path.node_count = inst.node_count();
  path.breakpoints.reserve(static_cast<std::size_t>(inst.breakpoint_count()));
  for (const BreakpointRef& bp : inst.global_index())
    path.breakpoints.push_back({bp.value, bp.node});
  path.schedule = find_all_fusing_values(inst, stats);
  const int p = path.schedule.fusing_value_count();
  for (int j = 0; j <= p; ++j) {
    const std::int64_t next =
        j < p ? path.schedule.entries[static_cast<std::size_t>(j) + 1].lambda : kLambdaInf;
    ReducedProblem rp =
        build_reduced_problem(path.schedule.entries[static_cast<std::size_t>(j)].group, j,
                              path.schedule.entries[static_cast<std::size_t>(j)].lambda, next);
    path.scans.push_back(solve_reduced_plfl(rp, inst));
    path.problems.push_back(std::move(rp));
  }
  return path;
}

/// Optimal solution at lambda: locate the segment by binary search, the
/// containing interval of each super-node tree by point location, and
/// broadcast values through the super-node table.
inline std::vector<Rational> eval_path(const SolutionPath& path, std::int64_t lambda) {
  if (lambda < 0) throw std::invalid_argument("eval_path: lambda must be nonnegative");
  const int j = path.segment_for(lambda);
  const ReducedProblem& rp = path.problems[static_cast<std::size_t>(j)];
  const ReducedPathScan& scan = path.scans[static_cast<std::size_t>(j)];
  std::vector<Rational> per_supernode(static_cast<std::size_t>(rp.supernode_count));
  for (int I = 0; I < rp.supernode_count; ++I) {
    const Rational* v = scan.trees[static_cast<std::size_t>(I)].find(lambda);
    if (v == nullptr) throw UncoveredLambda("eval_path: lambda not covered");
    per_supernode[static_cast<std::size_t>(I)] = *v;
  }
  std::vector<Rational> x(static_cast<std::size_t>(path.node_count));
  for (int i = 0; i < path.node_count; ++i)
    x[static_cast<std::size_t>(i)] = per_supernode[static_cast<std::size_t>(
        rp.to_supernode[static_cast<std::size_t>(i)])];
  return x;
}

/// All lambda for which x*_{node_lo} = ... = x*_{node_hi} = value of global
/// breakpoint k, as sorted maximal intervals; nullopt when no lambda
/// qualifies. Coincident breakpoints with the same value are all honored, so
/// the answer depends only on the breakpoint's value. For each matching
/// breakpoint, a binary search over the (coarsening) schedule finds the
/// first entry fusing the queried nodes with the breakpoint's owner; from
/// there on the per-step insertion lists contribute their intervals.
inline std::optional<std::vector<LambdaInterval>> inverse_query(const SolutionPath& path,
                                                                int node_lo, int node_hi, int k) {
  const Rational& wanted = path.breakpoints[static_cast<std::size_t>(k)].value;
  const int p = path.schedule.fusing_value_count();
  std::vector<LambdaInterval> collected;
  for (std::size_t kk = 0; kk < path.breakpoints.size(); ++kk) {
    if (path.breakpoints[kk].value != wanted) continue;
    const int owner = path.breakpoints[kk].node;
    const int lo = std::min(node_lo, owner);
    const int hi = std::max(node_hi, owner);
    const auto fused_at = [&](int j) {
      return path.schedule.entries[static_cast<std::size_t>(j)].group.fused_together(lo, hi);
    };
    if (!fused_at(p)) continue;
    int first = 0;
    int last = p;
    while (first < last) {
      const int mid = (first + last) / 2;
      if (fused_at(mid))
        last = mid;
      else
        first = mid + 1;
    }
    for (int j = first; j <= p; ++j)
      for (const LambdaInterval& intv :
           path.scans[static_cast<std::size_t>(j)].inserted_at_step[kk])
        collected.push_back(intv);
  }
  if (collected.empty()) return std::nullopt;
  std::sort(collected.begin(), collected.end(),
            [](const LambdaInterval& a, const LambdaInterval& b) { return a.lo < b.lo; });
  std::vector<LambdaInterval> merged;
  for (const LambdaInterval& intv : collected) {
    if (merged.empty()) {
      merged.push_back(intv);
      continue;
    }
    LambdaInterval& back = merged.back();
    if (back.hi == kLambdaInf) break;
    if (intv.lo <= back.hi + 1)
      back.hi = std::max(back.hi, intv.hi);
    else
      merged.push_back(intv);
  }
  return merged;
}

}  // namespace flpath
