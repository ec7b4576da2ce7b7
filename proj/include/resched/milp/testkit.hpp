#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "resched/milp/adapter.hpp"

// Behavioural conformance checks for SolverAdapter implementations. Each
// check builds a tiny model with a known optimum and verifies the adapter's
// answer; run_conformance returns the list of failed checks (empty on a
// conforming adapter).

namespace resched::milp::testkit {

using AdapterFactory = std::function<std::unique_ptr<SolverAdapter>()>;

namespace detail {

inline LinearConstraint row(std::vector<LinearTerm> terms, Sense sense, std::int64_t rhs) {
  return LinearConstraint{std::move(terms), sense, rhs};
}

inline void check(std::vector<std::string>& failures, bool ok, const std::string& name) {
  if (!ok) failures.push_back(name);
}

}  // namespace detail

inline std::vector<std::string> run_conformance(const AdapterFactory& factory) {
  using detail::check;
  using detail::row;
  std::vector<std::string> failures;

  {  // Unconstrained minimization keeps positive costs at zero.
    auto solver = factory();
    const int a = solver->add_binary_var(5);
    const int b = solver->add_binary_var(-2);
    const int c = solver->add_binary_var(3);
    MilpOutcome out = solver->solve_with_integer_callback(nullptr);
    check(failures, out.status == MilpStatus::kOptimal, "unconstrained: status");
    check(failures,
          out.has_incumbent && out.objective == -2 && out.values[a] == 0 && out.values[b] == 1 &&
              out.values[c] == 0,
          "unconstrained: solution");
  }

  {  // Exactly-one group picks its cheapest member.
    auto solver = factory();
    const int a = solver->add_binary_var(4);
    const int b = solver->add_binary_var(2);
    const int c = solver->add_binary_var(7);
    solver->add_linear_constraint(row({{a, 1}, {b, 1}, {c, 1}}, Sense::kEq, 1));
    MilpOutcome out = solver->solve_with_integer_callback(nullptr);
    check(failures, out.status == MilpStatus::kOptimal && out.objective == 2 && out.values[b] == 1,
          "choice: cheapest");
  }

  {  // An upper bound forces the costlier option.
    auto solver = factory();
    const int cheap = solver->add_binary_var(1);
    const int dear = solver->add_binary_var(5);
    solver->add_linear_constraint(row({{cheap, 1}, {dear, 1}}, Sense::kEq, 1));
    solver->add_linear_constraint(row({{cheap, 1}}, Sense::kLe, 0));
    MilpOutcome out = solver->solve_with_integer_callback(nullptr);
    check(failures, out.status == MilpStatus::kOptimal && out.objective == 5 && out.values[dear] == 1,
          "le row: forces alternative");
  }

  {  // Covering constraint.
    auto solver = factory();
    const int a = solver->add_binary_var(3);
    const int b = solver->add_binary_var(4);
    solver->add_linear_constraint(row({{a, 1}, {b, 1}}, Sense::kGe, 1));
    MilpOutcome out = solver->solve_with_integer_callback(nullptr);
    check(failures, out.status == MilpStatus::kOptimal && out.objective == 3 && out.values[a] == 1,
          "ge row: cover");
  }

  {  // Equality fixing two variables.
    auto solver = factory();
    const int a = solver->add_binary_var(1);
    const int b = solver->add_binary_var(1);
    solver->add_linear_constraint(row({{a, 1}, {b, 1}}, Sense::kEq, 2));
    MilpOutcome out = solver->solve_with_integer_callback(nullptr);
    check(failures, out.status == MilpStatus::kOptimal && out.objective == 2, "eq row: both");
  }

  {  // Negative coefficients.
    auto solver = factory();
    const int a = solver->add_binary_var(0);
    const int b = solver->add_binary_var(0);
    solver->add_linear_constraint(row({{a, 1}, {b, -1}}, Sense::kLe, -1));
    MilpOutcome out = solver->solve_with_integer_callback(nullptr);
    check(failures,
          out.status == MilpStatus::kOptimal && out.values[a] == 0 && out.values[b] == 1,
          "negative coefficients");
  }

  {  // Contradiction is infeasible.
    auto solver = factory();
    const int a = solver->add_binary_var(1);
    solver->add_linear_constraint(row({{a, 1}}, Sense::kLe, 0));
    solver->add_linear_constraint(row({{a, 1}}, Sense::kGe, 1));
    MilpOutcome out = solver->solve_with_integer_callback(nullptr);
    check(failures, out.status == MilpStatus::kInfeasible && !out.has_incumbent, "infeasible model");
  }

  {  // Lazy rejection walks to the best surviving candidate.
    auto solver = factory();
    const int a = solver->add_binary_var(1);
    const int b = solver->add_binary_var(2);
    const int c = solver->add_binary_var(3);
    solver->add_linear_constraint(row({{a, 1}, {b, 1}, {c, 1}}, Sense::kEq, 1));
    int invocations = 0;
    MilpOutcome out = solver->solve_with_integer_callback(
        [&](const std::vector<std::uint8_t>& values) -> std::vector<LinearConstraint> {
          ++invocations;
          if (values[c] == 1) return {};  // accept only the costliest option
          if (values[a] == 1) return {row({{a, 1}}, Sense::kLe, 0)};
          return {row({{b, 1}}, Sense::kLe, 0)};
        });
    check(failures, out.status == MilpStatus::kOptimal && out.objective == 3 && out.values[c] == 1,
          "lazy: final solution");
    check(failures, invocations >= 3, "lazy: callback sees every candidate");
  }

  {  // A zero time limit reports a timeout instead of hanging.
    auto solver = factory();
    for (int i = 0; i < 30; ++i) solver->add_binary_var(i % 5);
    solver->set_time_limit(std::chrono::milliseconds(0));
    MilpOutcome out = solver->solve_with_integer_callback(nullptr);
    check(failures, out.status != MilpStatus::kInfeasible, "time limit: not infeasible");
  }

  {  // Determinism: identical models give identical assignments.
    const auto build_and_solve = [&]() {
      auto solver = factory();
      std::vector<int> vars;
      for (int i = 0; i < 9; ++i) vars.push_back(solver->add_binary_var((i * 7) % 4));
      for (int g = 0; g < 3; ++g) {
        solver->add_linear_constraint(row(
            {{vars[3 * g], 1}, {vars[3 * g + 1], 1}, {vars[3 * g + 2], 1}}, Sense::kEq, 1));
      }
      solver->add_linear_constraint(row({{vars[0], 1}, {vars[3], 1}, {vars[6], 1}}, Sense::kLe, 1));
      return solver->solve_with_integer_callback(nullptr);
    };
    MilpOutcome first = build_and_solve();
    MilpOutcome second = build_and_solve();
    check(failures,
          first.status == second.status && first.values == second.values &&
              first.objective == second.objective,
          "determinism");
  }

  return failures;
}

}  // namespace resched::milp::testkit
