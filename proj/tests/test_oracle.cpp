#include <catch2/catch.hpp>
#include <random>

#include "flpath/oracle.hpp"
#include "support.hpp"

using namespace flpath;

TEST_CASE("full enumeration finds the optimal set and its maximum") {
  const ProblemInstance a = testing::instance_a();

  const auto at2 = oracle::brute_force_fixed(a, 2, oracle::Mode::full_enumeration);
  CHECK(at2.objective == Rational(4));
  CHECK(at2.solution == std::vector<Rational>{3, 3});
  CHECK(at2.optimal_count == 3);  // (1,1), (1,3), (3,3) on the grid

  const auto at0 = oracle::brute_force_fixed(a, 0, oracle::Mode::full_enumeration);
  CHECK(at0.objective == Rational(0));
  CHECK(at0.solution == std::vector<Rational>{1, 3});

  const ProblemInstance single(std::vector<ConvexPwl>{testing::abs_loss(1, 2)});
  for (const std::int64_t lambda : {0, 3, 50}) {
    const auto r = oracle::brute_force_fixed(single, lambda, oracle::Mode::full_enumeration);
    CHECK(r.objective == Rational(0));
    CHECK(r.solution == std::vector<Rational>{1});
  }
}

TEST_CASE("enumeration limits") {
  std::vector<ConvexPwl> losses;
  for (int i = 0; i < 6; ++i) losses.push_back(testing::abs_loss(i, 1));
  const ProblemInstance big(std::move(losses));
  CHECK_THROWS_AS(oracle::brute_force_fixed(big, 1, oracle::Mode::full_enumeration), TooLarge);
  CHECK_NOTHROW(oracle::brute_force_fixed(big, 1, oracle::Mode::objective_only));
}

TEST_CASE("sweep records solutions and fusing events") {
  const ProblemInstance a = testing::instance_a();
  const oracle::OracleReport report = oracle::sweep(a, 5, oracle::Mode::full_enumeration);
  REQUIRE(report.entries.size() == 6);
  CHECK(report.fusing_events == std::vector<std::int64_t>{2});
  const std::vector<std::vector<Rational>> expected{{1, 3}, {1, 3}, {3, 3},
                                                    {3, 3}, {3, 3}, {3, 3}};
  for (std::size_t t = 0; t < expected.size(); ++t) CHECK(report.entries[t].solution == expected[t]);

  const ProblemInstance twin(
      std::vector<ConvexPwl>{testing::abs_loss(2, 1), testing::abs_loss(2, 1)});
  CHECK(oracle::sweep(twin, 4, oracle::Mode::full_enumeration).fusing_events.empty());

  const ProblemInstance single(std::vector<ConvexPwl>{testing::abs_loss(1, 2)});
  const auto constant = oracle::sweep(single, 4, oracle::Mode::full_enumeration);
  for (const auto& entry : constant.entries) CHECK(entry.solution == std::vector<Rational>{1});
}

TEST_CASE("verify_path reports exactly the injected deviations") {
  const ProblemInstance a = testing::instance_a();
  const SolutionPath path = solve_full_path(a);
  oracle::OracleReport baseline = oracle::sweep(a, 5, oracle::Mode::full_enumeration);

  const auto clean = oracle::verify_path(path, a, baseline, oracle::Mode::full_enumeration);
  CHECK(clean.mismatches.empty());

  oracle::OracleReport tampered = baseline;
  tampered.entries[4].solution[0] = Rational(-7);  // perturb one lambda, one node
  const auto dirty = oracle::verify_path(path, a, tampered, oracle::Mode::full_enumeration);
  REQUIRE(dirty.mismatches.size() == 1);
  CHECK(dirty.mismatches[0].lambda == 4);
  CHECK(dirty.mismatches[0].node == 0);

  const auto objective_clean = oracle::verify_path(path, a, baseline, oracle::Mode::objective_only);
  CHECK(objective_clean.mismatches.empty());
}

TEST_CASE("chain DP agrees with enumeration, including the maximal solution") {
  std::mt19937_64 rng(271828);
  testing::InstanceSpec spec;
  spec.n_max = 4;
  spec.qi_max = 2;
  for (int trial = 0; trial < 80; ++trial) {
    const ProblemInstance inst = testing::random_instance(rng, spec);
    const std::int64_t hi = lambda_max(inst) + 2;
    std::uniform_int_distribution<std::int64_t> pick(0, hi);
    for (int t = 0; t < 6; ++t) {
      const std::int64_t lambda = pick(rng);
      const auto enumerated =
          oracle::brute_force_fixed(inst, lambda, oracle::Mode::full_enumeration);
      const auto dp = oracle::brute_force_fixed(inst, lambda, oracle::Mode::objective_only);
      CHECK(dp.objective == enumerated.objective);
      CHECK(dp.solution == enumerated.solution);
    }
  }
}

TEST_CASE("grid restriction is sound: midpoints never beat the grid optimum") {
  std::mt19937_64 rng(1618);
  testing::InstanceSpec spec;
  spec.n_max = 3;
  spec.qi_max = 2;
  for (int trial = 0; trial < 12; ++trial) {
    const ProblemInstance inst = testing::random_instance(rng, spec);
    // Augment the value grid with midpoints and points outside the hull.
    std::vector<Rational> grid = oracle::distinct_breakpoint_values(inst);
    std::vector<Rational> augmented = grid;
    for (std::size_t t = 1; t < grid.size(); ++t)
      augmented.push_back((grid[t - 1] + grid[t]) / Rational(2));
    augmented.push_back(grid.front() - Rational(1));
    augmented.push_back(grid.back() + Rational(1));
    std::sort(augmented.begin(), augmented.end());

    const int n = inst.node_count();
    for (const std::int64_t lambda : {0, 1, 2, 5}) {
      const Rational grid_best =
          oracle::brute_force_fixed(inst, lambda, oracle::Mode::full_enumeration).objective;
      // Exhaustive search over the augmented grid.
      std::vector<std::size_t> odo(static_cast<std::size_t>(n), 0);
      std::vector<Rational> x(static_cast<std::size_t>(n));
      Rational best = grid_best;
      for (;;) {
        for (std::size_t i = 0; i < odo.size(); ++i) x[i] = augmented[odo[i]];
        const Rational obj = inst.objective(x, lambda);
        if (obj < best) best = obj;
        std::size_t pos = 0;
        while (pos < odo.size() && ++odo[pos] == augmented.size()) {
          odo[pos] = 0;
          ++pos;
        }
        if (pos == odo.size()) break;
      }
      CHECK(best == grid_best);
    }
  }
}

TEST_CASE("objective-only verification scales to a 50-node instance") {
  std::vector<ConvexPwl> losses;
  for (int i = 0; i < 50; ++i)
    losses.push_back(testing::abs_loss(Rational((i * 13) % 21 - 10), Rational(1 + i % 3)));
  const ProblemInstance inst(std::move(losses));
  const SolutionPath path = solve_full_path(inst);
  const auto report = oracle::verify_path(
      path, inst, oracle::sweep(inst, 40, oracle::Mode::objective_only),
      oracle::Mode::objective_only);
  CHECK(report.mismatches.empty());
}

TEST_CASE("oracle baseline satisfies fusing persistence") {
  std::mt19937_64 rng(41);
  testing::InstanceSpec spec;
  spec.n_max = 4;
  spec.qi_max = 2;
  for (int trial = 0; trial < 15; ++trial) {
    const ProblemInstance inst = testing::random_instance(rng, spec);
    const auto report =
        oracle::sweep(inst, lambda_max(inst) + 3, oracle::Mode::full_enumeration);
    for (int i = 0; i + 1 < inst.node_count(); ++i) {
      bool fused = false;
      for (const auto& entry : report.entries) {
        const bool now = entry.group.fused_together(i, i + 1);
        REQUIRE((!fused || now));  // a violation here is an oracle bug
        fused = fused || now;
      }
    }
  }
}
