#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "resched/core.hpp"
#include "resched/fixed_perm.hpp"
#include "resched/solve_result.hpp"

// Robustness checking of arbitrary baseline schedules plus the brute-force
// oracles used by the tests and by the LBBD subproblem.

namespace resched {

/// Enumeration budgets for the exhaustive oracles.
struct OracleBudget {
  std::int64_t max_scenarios = std::int64_t{1} << 20;
  int max_permutation_n = 8;
};

struct RobustnessWitness {
  int position = 0;    // position of the pinned operation
  int shift_time = 0;  // its realised start in the violating right-shift prefix
  int interval = 0;    // violated metering interval
};

struct RobustnessVerdict {
  bool robust = true;
  std::optional<RobustnessWitness> witness;
};

/// Exact robustness check without scenario enumeration. For every position
/// and every realised start t of that operation, the right-shift prefix
/// pinned at t dominates the energy consumption of every realised schedule
/// in the intervals the operation intersects, so checking those prefixes is
/// complete. The reported witness is the lexicographically smallest
/// (position, shift time, interval) triple.
inline RobustnessVerdict is_robust(const Instance& inst, const BaselineSchedule& base) {
  const RealisedSchedule lst = latest_start_schedule(inst, base);
  const int n = base.perm.size();
  std::vector<int> shifted(static_cast<std::size_t>(n));
  for (int pos = 0; pos < n; ++pos) {
    const Operation& op = inst.op(base.perm.at(pos));
    const int s = base.start_of(op.id);
    for (int t = s; t <= lst.start_at_pos(pos); ++t) {
      shifted.resize(static_cast<std::size_t>(pos) + 1);
      shifted[pos] = t;
      for (int q = pos - 1; q >= 0; --q) {
        shifted[q] =
            std::min(lst.start_at_pos(q), shifted[q + 1] - inst.op(base.perm.at(q)).processing);
      }
      const int first_interval = inst.interval_of(t);
      const int last_interval = inst.interval_of(t + op.processing - 1);
      for (int interval = first_interval; interval <= last_interval; ++interval) {
        EnergyMilli total = 0;
        for (int q = pos; q >= 0; --q) {
          const Operation& prefix_op = inst.op(base.perm.at(q));
          if (shifted[q] + prefix_op.processing <= inst.interval_start(interval)) break;
          total += static_cast<EnergyMilli>(operation_interval_intersection(
                       inst, interval, prefix_op.id, shifted[q])) *
                   prefix_op.power_milli;
        }
        if (total > inst.energy_limit_milli(interval)) {
          return RobustnessVerdict{false, RobustnessWitness{pos, t, interval}};
        }
      }
    }
  }
  return RobustnessVerdict{true, std::nullopt};
}

struct BruteForceWitness {
  Scenario scenario;
  int interval = 0;
};

struct BruteForceVerdict {
  bool robust = true;
  std::optional<BruteForceWitness> witness;
};

/// Checks all (max_deviation+1)^n scenarios. Witness is the first violating
/// scenario in odometer order together with its violated interval.
inline BruteForceVerdict brute_force_is_robust(const Instance& inst, const BaselineSchedule& base,
                                               const OracleBudget& budget = {}) {
  const int n = inst.n();
  const int dmax = inst.max_deviation();
  std::int64_t count = 1;
  for (int i = 0; i < n; ++i) {
    count *= dmax + 1;
    if (count > budget.max_scenarios) {
      throw BudgetExceeded("scenario enumeration over budget");
    }
  }

  Scenario scen{std::vector<int>(static_cast<std::size_t>(n), 0)};
  std::vector<int> realised(static_cast<std::size_t>(n));
  while (true) {
    for (int pos = 0; pos < n; ++pos) {
      const int id = base.perm.at(pos);
      realised[pos] = pos == 0
                          ? base.start_of(id) + scen.of(id)
                          : std::max(base.start_of(id),
                                     realised[pos - 1] + inst.op(base.perm.at(pos - 1)).processing) +
                                scen.of(id);
    }
    for (int interval = 0; interval < inst.num_intervals(); ++interval) {
      EnergyMilli total = 0;
      for (int pos = 0; pos < n; ++pos) {
        const Operation& op = inst.op(base.perm.at(pos));
        total += static_cast<EnergyMilli>(
                     operation_interval_intersection(inst, interval, op.id, realised[pos])) *
                 op.power_milli;
      }
      if (total > inst.energy_limit_milli(interval)) {
        return BruteForceVerdict{false, BruteForceWitness{scen, interval}};
      }
    }
    int i = 0;
    while (i < n && scen.deviation[i] == dmax) scen.deviation[i++] = 0;
    if (i == n) break;
    ++scen.deviation[i];
  }
  return BruteForceVerdict{true, std::nullopt};
}

/// Exhaustive optimum over all n! permutations via the fixed-permutation
/// algorithm. Ties are broken towards the lexicographically smallest
/// permutation. Throws BudgetExceeded above the configured n cap.
inline SolveResult brute_force_optimum(const Instance& inst, const OracleBudget& budget = {}) {
  if (inst.n() > budget.max_permutation_n) {
    throw BudgetExceeded("permutation enumeration over budget");
  }
  std::vector<int> order(static_cast<std::size_t>(inst.n()));
  for (int i = 0; i < inst.n(); ++i) order[i] = i + 1;

  SolveResult result;
  result.status = SolveStatus::kInfeasible;
  std::int64_t evaluated = 0;
  do {
    ++evaluated;
    FixedPermResult fixed = optimal_robust_schedule(inst, Permutation(order));
    if (fixed.status != FixedPermStatus::kFeasible) continue;
    const std::int64_t objective = total_tardiness(inst, *fixed.schedule);
    if (result.status == SolveStatus::kInfeasible || objective < result.objective) {
      result.status = SolveStatus::kFeasible;
      result.objective = objective;
      result.schedule = std::move(fixed.schedule);
    }
  } while (std::next_permutation(order.begin(), order.end()));
  result.proven_optimal = result.status == SolveStatus::kFeasible;
  result.counters["permutations"] = evaluated;
  return result;
}

}  // namespace resched
