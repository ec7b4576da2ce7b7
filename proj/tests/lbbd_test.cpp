#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "resched/lbbd.hpp"
#include "resched/milp/dfs_solver.hpp"
#include "resched/verify.hpp"
#include "support/fixtures.hpp"
#include "support/sweep.hpp"

using namespace resched;

namespace {

std::int64_t evaluate_row(const MasterRow& row, const std::vector<std::uint8_t>& values) {
  std::int64_t lhs = 0;
  for (const auto& [var, coeff] : row.terms) lhs += coeff * values[var];
  return lhs;
}

std::vector<std::uint8_t> substitute(const MasterModel& model, const BaselineSchedule& base) {
  std::vector<std::uint8_t> values(model.vars.size(), 0);
  for (std::size_t id = 1; id <= model.var_range.size(); ++id) {
    values[model.var_index(static_cast<int>(id), base.start_of(static_cast<int>(id)))] = 1;
  }
  return values;
}

}  // namespace

TEST_CASE("master model shape") {
  Instance inst = resched::testing::sweep_instance(4, 2, 17);
  MasterModel model = build_master(inst);

  std::int64_t expected_vars = 0;
  for (const Operation& op : inst.operations()) expected_vars += inst.max_start() - op.release + 1;
  CHECK(static_cast<std::int64_t>(model.vars.size()) == expected_vars);
  CHECK(model.num_energy_terms == inst.horizon() - inst.min_release());

  for (const MasterStartVar& var : model.vars) {
    const Operation& op = inst.op(var.id);
    CHECK(var.objective == std::max<std::int64_t>(0, var.t + op.processing - op.due));
  }

  int single_dev_rows = 0;
  for (const MasterRow& row : model.rows) {
    if (row.kind == MasterRowKind::kSingleDeviation) ++single_dev_rows;
  }
  CHECK(single_dev_rows > 0);

  Instance frozen(inst.operations(), inst.interval_length(), inst.energy_limits_milli(), 0);
  MasterModel frozen_model = build_master(frozen);
  for (const MasterRow& row : frozen_model.rows) {
    CHECK(row.kind != MasterRowKind::kSingleDeviation);
  }
}

TEST_CASE("master optimum lower-bounds the robust optimum") {
  for (int seed = 0; seed < 20; ++seed) {
    const int n = 2 + seed % 3;
    Instance inst = resched::testing::sweep_instance(n, 1 + seed % 3, 1300 + seed);
    SolveResult exact = brute_force_optimum(inst);

    MasterModel model = build_master(inst);
    milp::DfsMilpSolver solver;
    for (const MasterStartVar& var : model.vars) solver.add_binary_var(var.objective);
    for (const MasterRow& row : model.rows) {
      milp::LinearConstraint constraint;
      constraint.sense = row.sense;
      constraint.rhs = row.rhs;
      for (const auto& [var, coeff] : row.terms) constraint.terms.push_back({var, coeff});
      solver.add_linear_constraint(std::move(constraint));
    }
    milp::MilpOutcome master_only = solver.solve_with_integer_callback(nullptr);

    if (exact.status == SolveStatus::kFeasible) {
      REQUIRE(master_only.status == milp::MilpStatus::kOptimal);
      CHECK(master_only.objective <= exact.objective);
    }
  }
}

TEST_CASE("every robust fixed-permutation schedule satisfies the master") {
  for (int seed = 0; seed < 15; ++seed) {
    const int n = 3 + seed % 3;
    Instance inst = resched::testing::sweep_instance(n, seed % 4, 2700 + seed);
    MasterModel model = build_master(inst);
    for (int variant = 0; variant < 4; ++variant) {
      Permutation perm = resched::testing::sweep_permutation(n, seed * 4 + variant);
      FixedPermResult fixed = optimal_robust_schedule(inst, perm);
      if (fixed.status != FixedPermStatus::kFeasible) continue;
      std::vector<std::uint8_t> values = substitute(model, *fixed.schedule);
      for (const MasterRow& row : model.rows) {
        const std::int64_t lhs = evaluate_row(row, values);
        if (row.sense == milp::Sense::kEq) {
          CHECK(lhs == row.rhs);
        } else {
          CHECK(lhs <= row.rhs);
        }
      }
    }
  }
}

TEST_CASE("order-forbidding intervals from the infeasible case") {
  SECTION("hand-evaluated two-operation example") {
    std::vector<Operation> ops{{1, 0, 5, 10, 10 * kMilli}, {2, 0, 4, 10, 10 * kMilli}};
    Instance inst(std::move(ops), 5, std::vector<EnergyMilli>(5, 100 * kMilli), 0);
    REQUIRE(inst.max_start() == 20);
    BaselineSchedule candidate = make_baseline(inst, {0, 5});
    std::vector<CutInterval> intervals = lbbd_detail::infeasible_case_intervals(inst, candidate);
    CHECK(intervals[0].lo == 0);
    CHECK(intervals[0].hi == 8);
    CHECK(intervals[1].lo == 5);
    CHECK(intervals[1].hi == 20);
  }

  SECTION("schedules sampled inside the intervals keep the order") {
    std::mt19937_64 rng(5);
    for (int seed = 0; seed < 30; ++seed) {
      const int n = 3 + seed % 3;
      Instance inst = resched::testing::sweep_instance(n, seed % 3, 3100 + seed);
      auto candidate = resched::testing::random_baseline(inst, 7700 + seed);
      if (!candidate) continue;
      std::vector<CutInterval> intervals =
          lbbd_detail::infeasible_case_intervals(inst, *candidate);
      int valid_samples = 0;
      for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> start(static_cast<std::size_t>(n));
        for (int id = 1; id <= n; ++id) {
          std::uniform_int_distribution<int> pick(intervals[id - 1].lo, intervals[id - 1].hi);
          start[id - 1] = pick(rng);
        }
        if (validate_baseline(inst, start)) continue;  // overlap or bound violation
        ++valid_samples;
        BaselineSchedule sampled = make_baseline(inst, start);
        CHECK(sampled.perm == candidate->perm);
      }
      // The candidate itself is always a valid sample.
      std::vector<int> own = candidate->start;
      CHECK(!validate_baseline(inst, own));
    }
  }
}

TEST_CASE("generated cuts exclude their candidate but never the optimal schedule") {
  int non_robust_seen = 0;
  for (int seed = 0; seed < 400 && non_robust_seen < 60; ++seed) {
    const int n = 3 + seed % 4;
    Instance inst = resched::testing::sweep_instance(n, 1 + seed % 3, 5200 + seed);
    auto candidate = resched::testing::random_baseline(inst, 660000 + seed, 2);
    if (!candidate) continue;
    if (is_robust(inst, *candidate).robust) continue;
    ++non_robust_seen;

    Cut cut = generate_cut(inst, *candidate);
    CHECK(cut.bound == n - 1);

    // Violated by the candidate: every operation starts inside its interval.
    int members = 0;
    for (int id = 1; id <= n; ++id) {
      if (cut.interval[id - 1].contains(candidate->start_of(id))) ++members;
    }
    CHECK(members == n);

    // Never excludes the optimal robust schedule of the candidate's
    // permutation.
    FixedPermResult fixed = optimal_robust_schedule(inst, candidate->perm);
    if (fixed.status == FixedPermStatus::kFeasible) {
      int optimal_members = 0;
      for (int id = 1; id <= n; ++id) {
        if (cut.interval[id - 1].contains(fixed.schedule->start_of(id))) ++optimal_members;
      }
      CHECK(optimal_members <= n - 1);
    }
  }
  CHECK(non_robust_seen >= 40);
}

TEST_CASE("cut generation rejects robust candidates") {
  std::vector<Operation> ops{{1, 0, 2, 4, 10 * kMilli}, {2, 0, 3, 8, 10 * kMilli}};
  Instance inst(std::move(ops), 5, std::vector<EnergyMilli>(4, 100 * kMilli), 0);
  BaselineSchedule schedule = make_baseline(inst, {0, 2});
  REQUIRE(is_robust(inst, schedule).robust);
  CHECK_THROWS_AS(generate_cut(inst, schedule), ContractViolation);
}

TEST_CASE("decomposition matches the exhaustive optimum") {
  int compared = 0;
  for (int seed = 0; seed < 40; ++seed) {
    const int n = 3 + seed % 4;  // 3..6
    const int dmax = seed % 3;
    Instance inst = resched::testing::sweep_instance(n, dmax, 8100 + seed);
    SolveResult exact = brute_force_optimum(inst);
    milp::DfsMilpSolver solver;
    std::set<std::vector<int>> seen;
    LbbdOptions options;
    options.on_candidate = [&](const BaselineSchedule& candidate) {
      // Each cut excludes its candidate, so no candidate repeats.
      auto [it, inserted] = seen.insert(candidate.start);
      (void)it;
      REQUIRE(inserted);
    };
    SolveResult result = lbbd_solve(inst, solver, options);
    REQUIRE(result.status == exact.status);
    if (exact.status == SolveStatus::kFeasible) {
      REQUIRE(result.objective == exact.objective);
      CHECK(result.proven_optimal);
      CHECK(is_robust(inst, *result.schedule).robust);
      if (dmax == 0) CHECK(result.counters.at("cuts") == 0);
    }
    ++compared;
  }
  CHECK(compared == 40);
}

TEST_CASE("warm-started decomposition still reaches the optimum") {
  Instance inst = resched::testing::sweep_instance(4, 2, 1234);
  SolveResult exact = brute_force_optimum(inst);
  REQUIRE(exact.status == SolveStatus::kFeasible);
  milp::DfsMilpSolver solver;
  LbbdOptions options;
  options.initial_ub = exact;
  SolveResult result = lbbd_solve(inst, solver, options);
  REQUIRE(result.status == SolveStatus::kFeasible);
  CHECK(result.objective == exact.objective);
  CHECK(result.proven_optimal);
}
