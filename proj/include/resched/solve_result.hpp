#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "resched/core.hpp"

namespace resched {

enum class SolveStatus { kFeasible, kInfeasible, kTimedOut };

inline const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kFeasible: return "feasible";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kTimedOut: return "timed_out";
  }
  return "unknown";
}

/// Outcome of a solver run. `schedule` is present iff a (possibly
/// non-optimal) robust schedule was found; on kTimedOut it is the incumbent.
struct SolveResult {
  SolveStatus status = SolveStatus::kInfeasible;
  std::optional<BaselineSchedule> schedule;
  std::int64_t objective = -1;
  bool proven_optimal = false;
  double runtime_ms = 0.0;
  std::map<std::string, std::int64_t> counters;
};

/// Thrown when an exhaustive oracle would exceed its configured budget.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a caller violates a documented precondition.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace resched
