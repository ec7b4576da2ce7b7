#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <vector>

// Solver-agnostic interface for the decomposition master problem: binary
// variables, linear constraints, minimization, and an integer-solution
// callback that may inject lazy constraints. Adapters must invoke the
// callback on every candidate integer solution before accepting it, and
// must serialize callback invocations.

namespace resched::milp {

enum class Sense { kLe, kEq, kGe };

struct LinearTerm {
  int var = 0;
  std::int64_t coeff = 0;
};

struct LinearConstraint {
  std::vector<LinearTerm> terms;
  Sense sense = Sense::kLe;
  std::int64_t rhs = 0;
};

enum class MilpStatus { kOptimal, kInfeasible, kTimedOut };

struct MilpOutcome {
  MilpStatus status = MilpStatus::kInfeasible;
  bool has_incumbent = false;
  std::vector<std::uint8_t> values;  // per-variable 0/1, valid iff has_incumbent
  std::int64_t objective = 0;
  std::int64_t nodes = 0;
};

/// Receives a candidate 0/1 assignment; returns constraints that exclude it
/// (rejecting the candidate), or an empty vector to accept it.
using IntegerCallback =
    std::function<std::vector<LinearConstraint>(const std::vector<std::uint8_t>&)>;

class SolverAdapter {
 public:
  virtual ~SolverAdapter() = default;

  /// Adds a binary variable with the given minimization coefficient and
  /// returns its index.
  virtual int add_binary_var(std::int64_t objective_coeff) = 0;

  virtual void add_linear_constraint(LinearConstraint constraint) = 0;

  virtual void set_time_limit(std::chrono::milliseconds limit) = 0;

  /// Minimizes, vetting every candidate through the callback. A null
  /// callback accepts everything.
  virtual MilpOutcome solve_with_integer_callback(const IntegerCallback& callback) = 0;
};

}  // namespace resched::milp
