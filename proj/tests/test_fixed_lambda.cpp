#include <catch2/catch.hpp>
#include <random>

#include "flpath/fixed_lambda.hpp"
#include "flpath/fusing.hpp"
#include "flpath/oracle.hpp"
#include "support.hpp"

using namespace flpath;

TEST_CASE("init_cut_state puts every node on the source side") {
  const ProblemInstance a = testing::instance_a();
  for (const std::int64_t lambda : {0, 1}) {
    const CutState state = init_cut_state(a, lambda);
    CHECK(state.status == std::vector<NodeStatus>{NodeStatus::source, NodeStatus::source});
    CHECK(state.cap_source == std::vector<Rational>{2, 2});
    CHECK(state.cap_sink == std::vector<Rational>{0, 0});
  }
  const ProblemInstance single(std::vector<ConvexPwl>{testing::abs_loss(0, 1)});
  CHECK(init_cut_state(single, 2).cap_source == std::vector<Rational>{1});
}

TEST_CASE("apply_breakpoint covers the three capacity-update cases") {
  // Case 2: slope crosses zero at the breakpoint.
  const ProblemInstance a = testing::instance_a();
  CutState state = init_cut_state(a, 1);
  apply_breakpoint(state, 0, a);
  CHECK(state.cap_source == std::vector<Rational>{0, 2});
  CHECK(state.cap_sink == std::vector<Rational>{2, 0});

  // Case 1: slope stays negative.
  const ProblemInstance neg(std::vector<ConvexPwl>{make_pwl({0, 5}, {-4, -1, 2}, 0)});
  CutState s1 = init_cut_state(neg, 0);
  apply_breakpoint(s1, 0, neg);
  CHECK(s1.cap_source == std::vector<Rational>{1});
  CHECK(s1.cap_sink == std::vector<Rational>{0});

  // Case 3: slope stays positive.
  const ProblemInstance pos(std::vector<ConvexPwl>{make_pwl({0, 5}, {-1, 1, 3}, 0)});
  CutState s2 = init_cut_state(pos, 0);
  apply_breakpoint(s2, 0, pos);
  CHECK(s2.cap_sink == std::vector<Rational>{1});
  apply_breakpoint(s2, 1, pos);
  CHECK(s2.cap_sink == std::vector<Rational>{3});
  CHECK(s2.cap_source == std::vector<Rational>{0});
}

TEST_CASE("best_shift_interval minimizes the cut delta around the hit node") {
  const ProblemInstance a = testing::instance_a();

  // lambda = 1, after breakpoint 1: [0,0] has delta -1, [0,1] has delta 0.
  CutState s1 = init_cut_state(a, 1);
  apply_breakpoint(s1, 0, a);
  CHECK(best_shift_interval(s1, 0) == std::make_pair(0, 0));

  // lambda = 3, after breakpoint 1: both candidates nonnegative.
  CutState s3 = init_cut_state(a, 3);
  apply_breakpoint(s3, 0, a);
  CHECK_FALSE(best_shift_interval(s3, 0).has_value());

  // lambda = 3, after breakpoint 2 with no earlier shift: [0,1] wins at -4.
  apply_breakpoint(s3, 1, a);
  CHECK(best_shift_interval(s3, 1) == std::make_pair(0, 1));

  // Sink nodes never shift again.
  s1.status[0] = NodeStatus::sink;
  CHECK_FALSE(best_shift_interval(s1, 0).has_value());
}

TEST_CASE("solve_fixed_lambda on the two-node instance") {
  const ProblemInstance a = testing::instance_a();
  CHECK(solve_fixed_lambda(a, 0) == std::vector<Rational>{1, 3});
  CHECK(solve_fixed_lambda(a, 1) == std::vector<Rational>{1, 3});
  CHECK(solve_fixed_lambda(a, 3) == std::vector<Rational>{3, 3});
}

TEST_CASE("manual scan preserves the nested cut property") {
  std::mt19937_64 rng(424242);
  testing::InstanceSpec spec;
  for (int trial = 0; trial < 50; ++trial) {
    const ProblemInstance inst = testing::random_instance(rng, spec);
    const std::int64_t lambda = static_cast<std::int64_t>(trial % 7);
    CutState state = init_cut_state(inst, lambda);
    int sinks = 0;
    for (int k = 0; k < inst.breakpoint_count(); ++k) {
      apply_breakpoint(state, k, inst);
      const BreakpointRef& bp = inst.breakpoint(k);
      if (const auto shift = best_shift_interval(state, bp.node)) {
        for (int i = shift->first; i <= shift->second; ++i) {
          REQUIRE(state.status[static_cast<std::size_t>(i)] == NodeStatus::source);
          state.status[static_cast<std::size_t>(i)] = NodeStatus::sink;
          state.assigned_value[static_cast<std::size_t>(i)] = bp.value;
          ++sinks;
        }
      }
      // One of the two adjacent arc capacities is always zero.
      for (int i = 0; i < inst.node_count(); ++i)
        CHECK((state.cap_source[static_cast<std::size_t>(i)].is_zero() ||
               state.cap_sink[static_cast<std::size_t>(i)].is_zero()));
    }
    CHECK(sinks == inst.node_count());
    std::vector<Rational> manual;
    for (const auto& v : state.assigned_value) manual.push_back(*v);
    CHECK(manual == solve_fixed_lambda(inst, lambda));
  }
}

TEST_CASE("solver matches the chain DP on full-size random instances") {
  std::mt19937_64 rng(1234);
  testing::InstanceSpec spec;  // n up to 5, q_i up to 4: beyond enumeration limits
  for (int trial = 0; trial < 40; ++trial) {
    const ProblemInstance inst = testing::random_instance(rng, spec);
    const std::int64_t hi = lambda_max(inst) + 2;
    for (std::int64_t lambda = 0; lambda <= hi; ++lambda) {
      const auto dp = oracle::brute_force_fixed(inst, lambda, oracle::Mode::objective_only);
      const std::vector<Rational> x = solve_fixed_lambda(inst, lambda);
      CHECK(x == dp.solution);
      CHECK(inst.objective(x, lambda) == dp.objective);
    }
  }
}

TEST_CASE("solver matches exhaustive enumeration and is componentwise maximal") {
  std::mt19937_64 rng(99);
  testing::InstanceSpec spec;
  spec.n_max = 5;
  spec.qi_max = 2;  // keeps q <= 10, inside the enumeration limits
  for (int trial = 0; trial < 60; ++trial) {
    const ProblemInstance inst = testing::random_instance(rng, spec);
    const std::int64_t hi = lambda_max(inst);
    for (std::int64_t lambda = 0; lambda <= hi; ++lambda) {
      const std::vector<Rational> x = solve_fixed_lambda(inst, lambda);
      const auto oracle_result =
          oracle::brute_force_fixed(inst, lambda, oracle::Mode::full_enumeration);
      CHECK(inst.objective(x, lambda) == oracle_result.objective);
      CHECK(x == oracle_result.solution);
      // Every value is a breakpoint of the global index.
      for (const Rational& v : x) {
        bool member = false;
        for (const BreakpointRef& bp : inst.global_index()) member = member || bp.value == v;
        CHECK(member);
      }
    }
  }
}

TEST_CASE("coincident breakpoints across nodes are handled") {
  // Both nodes kink at the same positions.
  const ProblemInstance inst(
      std::vector<ConvexPwl>{make_pwl({0, 2}, {-3, 1, 2}, 0), make_pwl({0, 2}, {-1, 0, 4}, 5)});
  for (std::int64_t lambda = 0; lambda <= lambda_max(inst); ++lambda) {
    const auto oracle_result =
        oracle::brute_force_fixed(inst, lambda, oracle::Mode::full_enumeration);
    CHECK(solve_fixed_lambda(inst, lambda) == oracle_result.solution);
  }
}
