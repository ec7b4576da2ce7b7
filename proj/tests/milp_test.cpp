#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <random>

#include "resched/milp/dfs_solver.hpp"
#include "resched/milp/testkit.hpp"

using namespace resched::milp;

TEST_CASE("reference solver passes the adapter conformance kit") {
  auto factory = [] { return std::make_unique<DfsMilpSolver>(); };
  std::vector<std::string> failures = testkit::run_conformance(factory);
  CAPTURE(failures);
  CHECK(failures.empty());
}

namespace {

// Exhaustive reference: enumerate all 2^n assignments.
std::optional<std::int64_t> enumerate_optimum(int num_vars,
                                              const std::vector<std::int64_t>& objective,
                                              const std::vector<LinearConstraint>& rows) {
  std::optional<std::int64_t> best;
  for (unsigned mask = 0; mask < (1u << num_vars); ++mask) {
    bool ok = true;
    for (const LinearConstraint& row : rows) {
      std::int64_t lhs = 0;
      for (const LinearTerm& term : row.terms) {
        if (mask & (1u << term.var)) lhs += term.coeff;
      }
      if (row.sense == Sense::kLe && lhs > row.rhs) ok = false;
      if (row.sense == Sense::kGe && lhs < row.rhs) ok = false;
      if (row.sense == Sense::kEq && lhs != row.rhs) ok = false;
      if (!ok) break;
    }
    if (!ok) continue;
    std::int64_t value = 0;
    for (int v = 0; v < num_vars; ++v) {
      if (mask & (1u << v)) value += objective[v];
    }
    if (!best || value < *best) best = value;
  }
  return best;
}

}  // namespace

TEST_CASE("reference solver matches exhaustive enumeration on random models") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const int num_groups = 1 + static_cast<int>(rng() % 3);
    const int group_size = 2 + static_cast<int>(rng() % 3);
    const int extras = static_cast<int>(rng() % 3);
    const int num_vars = num_groups * group_size + extras;
    if (num_vars > 14) continue;

    std::vector<std::int64_t> objective(num_vars);
    for (auto& value : objective) value = static_cast<std::int64_t>(rng() % 13) - 3;

    std::vector<LinearConstraint> rows;
    for (int g = 0; g < num_groups; ++g) {
      LinearConstraint row;
      for (int k = 0; k < group_size; ++k) row.terms.push_back({g * group_size + k, 1});
      row.sense = Sense::kEq;
      row.rhs = 1;
      rows.push_back(std::move(row));
    }
    const int num_random_rows = 1 + static_cast<int>(rng() % 4);
    for (int r = 0; r < num_random_rows; ++r) {
      LinearConstraint row;
      for (int v = 0; v < num_vars; ++v) {
        if (rng() % 3 == 0) {
          row.terms.push_back({v, static_cast<std::int64_t>(rng() % 9) - 4});
        }
      }
      if (row.terms.empty()) continue;
      row.sense = static_cast<Sense>(rng() % 3);
      row.rhs = static_cast<std::int64_t>(rng() % 7) - 2;
      rows.push_back(std::move(row));
    }

    DfsMilpSolver solver;
    for (int v = 0; v < num_vars; ++v) solver.add_binary_var(objective[v]);
    for (const LinearConstraint& row : rows) solver.add_linear_constraint(row);
    MilpOutcome out = solver.solve_with_integer_callback(nullptr);

    std::optional<std::int64_t> expected = enumerate_optimum(num_vars, objective, rows);
    if (expected) {
      REQUIRE(out.status == MilpStatus::kOptimal);
      REQUIRE(out.objective == *expected);
      // The reported assignment really achieves the objective and satisfies
      // every row.
      std::int64_t value = 0;
      for (int v = 0; v < num_vars; ++v) {
        if (out.values[v]) value += objective[v];
      }
      CHECK(value == out.objective);
      for (const LinearConstraint& row : rows) {
        std::int64_t lhs = 0;
        for (const LinearTerm& term : row.terms) lhs += term.coeff * out.values[term.var];
        if (row.sense == Sense::kLe) CHECK(lhs <= row.rhs);
        if (row.sense == Sense::kGe) CHECK(lhs >= row.rhs);
        if (row.sense == Sense::kEq) CHECK(lhs == row.rhs);
      }
    } else {
      REQUIRE(out.status == MilpStatus::kInfeasible);
    }
  }
}

TEST_CASE("lazy constraints added mid-search stay consistent across backtracking") {
  // Reject every candidate whose first group member is chosen, twice over
  // different groups; the solver must land on the best assignment avoiding
  // all rejected vars.
  DfsMilpSolver solver;
  std::vector<int> vars;
  for (int i = 0; i < 6; ++i) vars.push_back(solver.add_binary_var(i));
  solver.add_linear_constraint({{{vars[0], 1}, {vars[1], 1}, {vars[2], 1}}, Sense::kEq, 1});
  solver.add_linear_constraint({{{vars[3], 1}, {vars[4], 1}, {vars[5], 1}}, Sense::kEq, 1});
  int rejected = 0;
  MilpOutcome out = solver.solve_with_integer_callback(
      [&](const std::vector<std::uint8_t>& values) -> std::vector<LinearConstraint> {
        if (values[vars[0]] == 1 || values[vars[3]] == 1) {
          ++rejected;
          std::vector<LinearConstraint> cuts;
          if (values[vars[0]] == 1) cuts.push_back({{{vars[0], 1}}, Sense::kLe, 0});
          if (values[vars[3]] == 1) cuts.push_back({{{vars[3], 1}}, Sense::kLe, 0});
          return cuts;
        }
        return {};
      });
  REQUIRE(out.status == MilpStatus::kOptimal);
  CHECK(out.values[vars[1]] == 1);
  CHECK(out.values[vars[4]] == 1);
  CHECK(out.objective == 1 + 4);
  CHECK(rejected >= 1);
}
