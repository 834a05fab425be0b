#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <vector>

#include "flpath/path.hpp"

namespace flpath {

/// Wall-clock comparison of answering the given lambda queries through a
/// freshly built path (construction time included) versus one fixed-lambda
/// solve per query. Both routes' answers are cross-checked after the timed
/// regions.
struct BenchResult {
  double path_ms = 0.0;
  double scratch_ms = 0.0;
  double ratio = 0.0;  // scratch_ms / path_ms
  long mismatches = 0;
  long fixed_lambda_solves_in_path = 0;
};

inline BenchResult run_bench(const ProblemInstance& inst, std::span<const std::int64_t> lambdas) {
  using clock = std::chrono::steady_clock;
  BenchResult result;

  std::vector<std::vector<Rational>> via_path;
  via_path.reserve(lambdas.size());
  FusingSearchStats stats;
  const auto t0 = clock::now();
  const SolutionPath path = solve_full_path(inst, &stats);
  for (const std::int64_t lambda : lambdas) via_path.push_back(eval_path(path, lambda));
  const auto t1 = clock::now();

  std::vector<std::vector<Rational>> via_scratch;
  via_scratch.reserve(lambdas.size());
  const auto t2 = clock::now();
  for (const std::int64_t lambda : lambdas) via_scratch.push_back(solve_fixed_lambda(inst, lambda));
  const auto t3 = clock::now();

  result.path_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  result.scratch_ms = std::chrono::duration<double, std::milli>(t3 - t2).count();
  result.ratio = result.path_ms > 0.0 ? result.scratch_ms / result.path_ms : 0.0;
  result.fixed_lambda_solves_in_path = stats.fixed_lambda_solves;
  for (std::size_t t = 0; t < lambdas.size(); ++t)
    if (!(via_path[t] == via_scratch[t])) ++result.mismatches;
  return result;
}

}  // namespace flpath
