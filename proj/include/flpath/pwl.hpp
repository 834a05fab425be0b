#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "flpath/errors.hpp"
#include "flpath/rational.hpp"

namespace flpath {

/// Convex piecewise-linear function. `slopes[i]` is the slope of the piece
/// between `breakpoints[i-1]` and `breakpoints[i]` (extending to -inf on the
/// left of the first breakpoint and +inf on the right of the last one), so
/// there is always one more slope than breakpoints. `offset` is the function
/// value at the first breakpoint.
///
/// Invariants (enforced by make_pwl):
///   - breakpoints strictly ascending, at least one;
///   - slopes strictly ascending;
///   - coercive: first slope < 0 and last slope > 0.
///
/// Values are immutable after construction and safe to share across
/// concurrent solver runs.
struct ConvexPwl {
  std::vector<Rational> breakpoints;
  std::vector<Rational> slopes;
  Rational offset;

  [[nodiscard]] int piece_count() const { return static_cast<int>(slopes.size()); }
  [[nodiscard]] int breakpoint_count() const { return static_cast<int>(breakpoints.size()); }
};

enum class Side { left, right };

inline ConvexPwl make_pwl(std::vector<Rational> breakpoints, std::vector<Rational> slopes,
                          Rational offset = Rational(0)) {
  if (breakpoints.empty()) throw InvalidPwl("make_pwl: need at least one breakpoint");
  if (slopes.size() != breakpoints.size() + 1)
    throw InvalidPwl("make_pwl: need exactly breakpoints+1 slopes");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    if (!(breakpoints[i - 1] < breakpoints[i]))
      throw InvalidPwl("make_pwl: breakpoints not strictly ascending");
  for (std::size_t i = 1; i < slopes.size(); ++i)
    if (!(slopes[i - 1] < slopes[i])) throw InvalidPwl("make_pwl: slopes not strictly ascending");
  if (!slopes.front().is_negative() || !(Rational(0) < slopes.back()))
    throw NotCoercive("make_pwl: first slope must be < 0 and last slope > 0");
  return ConvexPwl{std::move(breakpoints), std::move(slopes), offset};
}

/// Exact function value by linear interpolation/extrapolation from `offset`.
inline Rational evaluate(const ConvexPwl& f, const Rational& x) {
  const Rational& b0 = f.breakpoints.front();
  if (x < b0) return f.offset + f.slopes.front() * (x - b0);
  Rational value = f.offset;
  for (std::size_t i = 0; i < f.breakpoints.size(); ++i) {
    const Rational& lo = f.breakpoints[i];
    if (!(lo < x)) break;
    const Rational hi = (i + 1 < f.breakpoints.size()) ? std::min(x, f.breakpoints[i + 1]) : x;
    value += f.slopes[i + 1] * (hi - lo);
  }
  return value;
}

/// Right: slope of the piece immediately right of x (index = count of
/// breakpoints <= x). Left: slope immediately left (count of breakpoints < x).
inline Rational subgradient(const ConvexPwl& f, const Rational& x, Side side) {
  std::size_t idx = 0;
  for (const Rational& b : f.breakpoints) {
    const bool counts = (side == Side::right) ? !(x < b) : (b < x);
    if (counts)
      ++idx;
    else
      break;
  }
  return f.slopes[idx];
}

/// Closed interval of minimizers; a single point unless a zero-slope piece
/// exists.
inline std::pair<Rational, Rational> minimizer_interval(const ConvexPwl& f) {
  // First slope index with slope >= 0; exists and is >= 1 by coercivity.
  std::size_t j = 0;
  while (f.slopes[j].is_negative()) ++j;
  if (f.slopes[j].is_zero()) return {f.breakpoints[j - 1], f.breakpoints[j]};
  return {f.breakpoints[j - 1], f.breakpoints[j - 1]};
}

inline Rational min_value(const ConvexPwl& f) { return evaluate(f, minimizer_interval(f).first); }

/// Pointwise sum. Breakpoints are the union of the inputs' breakpoints with
/// coincident entries merged by summing their slope jumps; slopes add
/// piecewise.
inline ConvexPwl sum_pwl(std::span<const ConvexPwl> fs) {
  if (fs.empty()) throw InvalidPwl("sum_pwl: empty input");
  std::vector<std::pair<Rational, Rational>> jumps;  // (breakpoint, slope jump)
  Rational base_slope(0);
  for (const ConvexPwl& f : fs) {
    base_slope += f.slopes.front();
    for (std::size_t k = 0; k < f.breakpoints.size(); ++k)
      jumps.emplace_back(f.breakpoints[k], f.slopes[k + 1] - f.slopes[k]);
  }
  std::sort(jumps.begin(), jumps.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<Rational> breakpoints;
  std::vector<Rational> slopes{base_slope};
  for (const auto& [bp, jump] : jumps) {
    if (!breakpoints.empty() && breakpoints.back() == bp) {
      slopes.back() += jump;  // coincident breakpoints collapse, jumps combine
    } else {
      breakpoints.push_back(bp);
      slopes.push_back(slopes.back() + jump);
    }
  }
  Rational offset(0);
  for (const ConvexPwl& f : fs) offset += evaluate(f, breakpoints.front());
  return make_pwl(std::move(breakpoints), std::move(slopes), offset);
}

/// Grid linearization of an arbitrary convex scalar function on [l, u] with
/// step eps: interior slopes are forward differences, and the box constraint
/// is absorbed by a leading slope -M and trailing slope +M. When (u - l)/eps
/// is not an integer, u is extended to the next grid point. Adjacent pieces
/// with equal slopes are merged, so the result is exact for piecewise-linear
/// input. M must exceed every interior slope magnitude (and, if the result
/// feeds a path solve, the coupling scale n * lambda_max).
inline ConvexPwl piecewise_linearize(const std::function<Rational(const Rational&)>& f,
                                     const Rational& l, const Rational& u, const Rational& eps,
                                     const Rational& M) {
  if (!(Rational(0) < eps)) throw InvalidEps("piecewise_linearize: eps must be positive");
  if (!(l < u)) throw InvalidPwl("piecewise_linearize: need l < u");
  const std::int64_t steps = ((u - l) / eps).ceil();

  std::vector<Rational> grid;
  grid.reserve(static_cast<std::size_t>(steps) + 1);
  for (std::int64_t t = 0; t <= steps; ++t) grid.push_back(l + eps * Rational(t));

  std::vector<Rational> values;
  values.reserve(grid.size());
  for (const Rational& x : grid) values.push_back(f(x));

  std::vector<Rational> breakpoints{grid.front()};
  std::vector<Rational> slopes{-M};
  for (std::int64_t t = 0; t < steps; ++t) {
    const Rational slope = (values[static_cast<std::size_t>(t) + 1] - values[static_cast<std::size_t>(t)]) / eps;
    if (!(slope.abs() < M))
      throw InvalidPwl("piecewise_linearize: M must exceed every interior slope magnitude");
    if (slope == slopes.back()) continue;  // merge equal-slope pieces
    slopes.push_back(slope);
    if (t > 0) breakpoints.push_back(grid[static_cast<std::size_t>(t)]);
  }
  slopes.push_back(M);
  breakpoints.push_back(grid.back());
  return make_pwl(std::move(breakpoints), std::move(slopes), values.front());
}

}  // namespace flpath
