#pragma once

#include <cassert>
#include <cstdint>
#include <optional>
#include <vector>

#include "resched/core.hpp"
#include "resched/solve_result.hpp"

// Optimal robust baseline schedule for a fixed permutation.
//
// Operations are assigned their earliest robust baseline start one position
// at a time. A start is robust relative to the already-fixed prefix when no
// realised schedule of the prefix can push the energy consumption of any
// metering interval above its limit. Scheduling every operation at its
// earliest robust start yields a schedule that is both robust and
// tardiness-optimal among all robust schedules with that permutation.

namespace resched {

enum class FixedPermStatus { kFeasible, kInfeasible };

struct FixedPermResult {
  FixedPermStatus status = FixedPermStatus::kInfeasible;
  std::optional<BaselineSchedule> schedule;
};

/// Position-indexed working state for the position-by-position construction.
/// Entries 0..pos-1 hold the earliest robust starts and the latest start
/// times of the already-fixed prefix.
struct PrefixSchedule {
  std::vector<int> start;  // by position
  std::vector<int> lst;    // by position

  int size() const { return static_cast<int>(start.size()); }

  void push(int s, int l) {
    start.push_back(s);
    lst.push_back(l);
  }
  void pop() {
    start.pop_back();
    lst.pop_back();
  }
};

namespace detail {

/// Right-shift starts of prefix positions 0..pos, with position pos pinned
/// to t, written into `shifted` (resized to pos+1). Same recursion as
/// right_shift_schedule but over the incremental prefix state.
inline void right_shift_prefix(const Instance& inst, const std::vector<int>& order,
                               const PrefixSchedule& prefix, int pos, int t,
                               std::vector<int>& shifted) {
  shifted.resize(static_cast<std::size_t>(pos) + 1);
  shifted[pos] = t;
  for (int q = pos - 1; q >= 0; --q) {
    shifted[q] = std::min(prefix.lst[q], shifted[q + 1] - inst.op(order[q]).processing);
  }
}

/// Energy (milli) of prefix positions 0..pos in `interval` under the starts
/// in `shifted`. Walks positions backwards and stops once completions fall
/// before the interval; right-shift starts are ordered, so earlier
/// positions cannot intersect either.
inline EnergyMilli prefix_interval_energy(const Instance& inst, const std::vector<int>& order,
                                          const std::vector<int>& shifted, int pos, int interval) {
  const int interval_start = inst.interval_start(interval);
  const int interval_end = inst.interval_end(interval);
  EnergyMilli total = 0;
  for (int q = pos; q >= 0; --q) {
    const Operation& op = inst.op(order[q]);
    if (shifted[q] + op.processing <= interval_start) break;
    total += static_cast<EnergyMilli>(interval_intersection_length(
                 interval_start, interval_end, shifted[q], shifted[q] + op.processing)) *
             op.power_milli;
  }
  return total;
}

/// Latest start time of the operation at `pos` given the prefix LSTs.
inline int prefix_lst(const Instance& inst, const std::vector<int>& order,
                      const PrefixSchedule& prefix, int pos, int start) {
  if (pos == 0) return start + inst.max_deviation();
  const Operation& prev = inst.op(order[pos - 1]);
  return std::max(start, prefix.lst[pos - 1] + prev.processing) + inst.max_deviation();
}

}  // namespace detail

/// Earliest robust baseline start of the operation at position `pos`,
/// appended to `prefix` (which must hold exactly `pos` fixed positions).
///
/// Step 1 scans the right-shift realised starts t of the predecessor in
/// decreasing order. For each t it checks only the last metering interval
/// the predecessor intersects: if the remaining energy budget there cannot
/// absorb the new operation, every earlier baseline start is non-robust as
/// well, so the start is pushed to the first possibly-robust value and the
/// scan stops. When the whole operation fits into the interval's remaining
/// budget, the scan jumps straight to the last t for which the predecessor
/// still touches the previous interval.
///
/// Step 2 bounds the intersection of the operation with every interval it
/// can touch on its own, pushing the start right whenever the maximum
/// realised intersection would exceed what the limit allows; its latest
/// start time is refreshed after every push.
inline FixedPermStatus extend_earliest_robust(const Instance& inst, const std::vector<int>& order,
                                              int pos, PrefixSchedule& prefix) {
  assert(prefix.size() == pos);
  const int D = inst.interval_length();
  const Operation& op = inst.op(order[pos]);

  int start = op.release;

  // Step 1: earliest start robust relative to the fixed prefix.
  if (pos > 0) {
    const Operation& prev = inst.op(order[pos - 1]);
    start = std::max(op.release, prefix.start[pos - 1] + prev.processing);
    int t = prefix.lst[pos - 1];
    const int t_low =
        std::min(prefix.lst[pos - 1], std::max(prefix.start[pos - 1], op.release - prev.processing));
    std::vector<int> shifted;
    while (t >= t_low) {
      detail::right_shift_prefix(inst, order, prefix, pos - 1, t, shifted);
      const int prev_completion = shifted[pos - 1] + prev.processing;
      const int interval = (prev_completion - 1) / D;
      const EnergyMilli used =
          detail::prefix_interval_energy(inst, order, shifted, pos - 1, interval);
      assert(used <= inst.energy_limit_milli(interval));
      // op.power_milli == 0 cannot violate any limit; treat the budget as
      // unbounded, which lands in the "entire operation fits" branch.
      const std::int64_t max_possible_intersection =
          op.power_milli == 0 ? std::int64_t{1} << 40
                              : (inst.energy_limit_milli(interval) - used) / op.power_milli;
      if (op.processing <= max_possible_intersection) {
        // Entire operation fits into `interval` without violating the
        // limit; continue with the last t touching the previous interval.
        t = inst.interval_start(interval) - prev.processing - 1;
      } else if (max_possible_intersection >= inst.interval_end(interval) - prev_completion) {
        --t;
      } else {
        start = std::max(op.release,
                         inst.interval_end(interval) - static_cast<int>(max_possible_intersection));
        break;
      }
    }
  }

  // Step 2: earliest start robust relative to the operation itself.
  int lst = detail::prefix_lst(inst, order, prefix, pos, start);
  int interval = start / D;
  while (interval < inst.num_intervals()) {
    const int max_intersection =
        std::min(op.processing, interval_intersection_length(inst.interval_start(interval),
                                                             inst.interval_end(interval), start,
                                                             lst + op.processing));
    if (max_intersection == 0) break;
    if (op.power_milli > 0) {
      const std::int64_t max_possible_intersection =
          inst.energy_limit_milli(interval) / op.power_milli;
      if (max_possible_intersection < max_intersection) {
        start = inst.interval_end(interval) - static_cast<int>(max_possible_intersection);
        lst = detail::prefix_lst(inst, order, prefix, pos, start);
      }
    }
    ++interval;
  }

  if (start > inst.max_start()) return FixedPermStatus::kInfeasible;
  prefix.push(start, lst);
  return FixedPermStatus::kFeasible;
}

/// Naive reference for extend_earliest_robust: tries candidate starts one by
/// one and checks every scenario of the prefix against every interval.
/// Enumeration size is (max_deviation+1)^(pos+1); throws BudgetExceeded when
/// that exceeds `max_scenarios`.
inline FixedPermStatus extend_earliest_robust_naive(const Instance& inst,
                                                    const std::vector<int>& order, int pos,
                                                    PrefixSchedule& prefix,
                                                    std::int64_t max_scenarios = std::int64_t{1}
                                                                                 << 20) {
  assert(prefix.size() == pos);
  const int dmax = inst.max_deviation();
  std::int64_t scenarios = 1;
  for (int q = 0; q <= pos; ++q) {
    scenarios *= dmax + 1;
    if (scenarios > max_scenarios) {
      throw BudgetExceeded("naive robust-start enumeration over budget");
    }
  }

  int start = inst.op(order[pos]).release;
  if (pos > 0) {
    const Operation& prev = inst.op(order[pos - 1]);
    start = std::max(start, prefix.start[pos - 1] + prev.processing);
  }

  std::vector<int> deviation(static_cast<std::size_t>(pos) + 1, 0);
  std::vector<int> realised(static_cast<std::size_t>(pos) + 1);
  while (start <= inst.max_start()) {
    bool violated = false;
    std::fill(deviation.begin(), deviation.end(), 0);
    // Odometer over all deviation vectors of the prefix.
    while (!violated) {
      for (int q = 0; q <= pos; ++q) {
        const int s = q < pos ? prefix.start[q] : start;
        realised[q] = q == 0 ? s + deviation[q]
                             : std::max(s, realised[q - 1] + inst.op(order[q - 1]).processing) +
                                   deviation[q];
      }
      for (int interval = 0; interval < inst.num_intervals() && !violated; ++interval) {
        EnergyMilli total = 0;
        for (int q = 0; q <= pos; ++q) {
          const Operation& op = inst.op(order[q]);
          total += static_cast<EnergyMilli>(operation_interval_intersection(inst, interval, op.id,
                                                                            realised[q])) *
                   op.power_milli;
        }
        if (total > inst.energy_limit_milli(interval)) violated = true;
      }
      int q = 0;
      while (q <= pos && deviation[q] == dmax) deviation[q++] = 0;
      if (q > pos) break;
      ++deviation[q];
    }
    if (!violated) {
      prefix.push(start, detail::prefix_lst(inst, order, prefix, pos, start));
      return FixedPermStatus::kFeasible;
    }
    ++start;
  }
  return FixedPermStatus::kInfeasible;
}

/// Optimal robust baseline schedule for a fixed permutation: every operation
/// at its earliest robust start. Infeasible iff some position's earliest
/// robust start exceeds the max start.
inline FixedPermResult optimal_robust_schedule(const Instance& inst, const Permutation& perm) {
  PrefixSchedule prefix;
  prefix.start.reserve(perm.size());
  prefix.lst.reserve(perm.size());
  for (int pos = 0; pos < perm.size(); ++pos) {
    if (extend_earliest_robust(inst, perm.order(), pos, prefix) == FixedPermStatus::kInfeasible) {
      return FixedPermResult{FixedPermStatus::kInfeasible, std::nullopt};
    }
  }
  std::vector<int> start(static_cast<std::size_t>(inst.n()));
  for (int pos = 0; pos < perm.size(); ++pos) start[perm.at(pos) - 1] = prefix.start[pos];
  return FixedPermResult{FixedPermStatus::kFeasible, BaselineSchedule{std::move(start), perm}};
}

}  // namespace resched
