#pragma once

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "resched/core.hpp"
#include "resched/fixed_perm.hpp"
#include "resched/milp/adapter.hpp"
#include "resched/solve_result.hpp"
#include "resched/verify.hpp"

// Logic-based Benders decomposition. The master is a time-indexed model of
// the non-robust problem (strengthened with single-deviation windows); every
// integer candidate is checked for robustness, and non-robust candidates are
// excluded by no-good cuts built from the optimal robust schedule of the
// candidate's permutation.

namespace resched {

/// Binary start variable: operation `id` starting at time t.
struct MasterStartVar {
  int id = 0;
  int t = 0;
  std::int64_t objective = 0;  // max(0, t + p - d)
};

enum class MasterRowKind { kStartOnce, kNoOverlap, kIntervalLimit, kSingleDeviation };

struct MasterRow {
  MasterRowKind kind = MasterRowKind::kNoOverlap;
  milp::Sense sense = milp::Sense::kLe;
  std::vector<std::pair<int, std::int64_t>> terms;  // (var index, coefficient)
  std::int64_t rhs = 0;
};

/// Time-indexed master model. Energy-in-time expressions are substituted
/// into the interval rows, so all rows range over the start variables only.
struct MasterModel {
  std::vector<MasterStartVar> vars;                    // grouped by id, ascending t
  std::vector<std::pair<int, int>> var_range;          // per id-1: [first, last) into vars
  std::vector<MasterRow> rows;
  int num_energy_terms = 0;                            // e_t for t in [min r, H-1]

  int var_index(int id, int t) const {
    const auto [first, last] = var_range[id - 1];
    (void)last;
    return first + (t - vars[first].t);
  }
};

/// Builds the master: one binary start variable per (operation, admissible
/// start), start-once rows, per-time-unit no-overlap rows, per-interval
/// limit rows, and for every deviation amount 1..max_deviation the
/// single-deviation window rows over [max(0, interval start - d),
/// interval end - 1 - d].
inline MasterModel build_master(const Instance& inst) {
  MasterModel model;
  const int n = inst.n();
  const int min_release = inst.min_release();

  for (int id = 1; id <= n; ++id) {
    const Operation& op = inst.op(id);
    const int first = static_cast<int>(model.vars.size());
    for (int t = op.release; t <= inst.max_start(); ++t) {
      model.vars.push_back(
          MasterStartVar{id, t, std::max<std::int64_t>(0, t + op.processing - op.due)});
    }
    model.var_range.emplace_back(first, static_cast<int>(model.vars.size()));
  }
  model.num_energy_terms = inst.horizon() - min_release;

  for (int id = 1; id <= n; ++id) {
    MasterRow row;
    row.kind = MasterRowKind::kStartOnce;
    row.sense = milp::Sense::kEq;
    row.rhs = 1;
    const auto [first, last] = model.var_range[id - 1];
    for (int v = first; v < last; ++v) row.terms.emplace_back(v, 1);
    model.rows.push_back(std::move(row));
  }

  // At most one operation runs in any time unit [t, t+1).
  for (int t = min_release; t < inst.horizon(); ++t) {
    MasterRow row;
    row.kind = MasterRowKind::kNoOverlap;
    row.sense = milp::Sense::kLe;
    row.rhs = 1;
    for (int id = 1; id <= n; ++id) {
      const Operation& op = inst.op(id);
      const int lo = std::max(op.release, t - op.processing + 1);
      const int hi = std::min(t, inst.max_start());
      for (int start = lo; start <= hi; ++start) {
        row.terms.emplace_back(model.var_index(id, start), 1);
      }
    }
    if (row.terms.size() > 1) model.rows.push_back(std::move(row));
  }

  // Energy in a window of time units [a, b]: each start variable
  // contributes power * (units of [t, t+p-1] inside [a, b]).
  const auto energy_window_row = [&](int a, int b, std::int64_t limit, MasterRowKind kind) {
    MasterRow row;
    row.kind = kind;
    row.sense = milp::Sense::kLe;
    row.rhs = limit;
    for (int id = 1; id <= n; ++id) {
      const Operation& op = inst.op(id);
      if (op.power_milli == 0) continue;
      const auto [first, last] = model.var_range[id - 1];
      for (int v = first; v < last; ++v) {
        const int units =
            interval_intersection_length(a, b + 1, model.vars[v].t, model.vars[v].t + op.processing);
        if (units > 0) {
          row.terms.emplace_back(v, static_cast<std::int64_t>(units) * op.power_milli);
        }
      }
    }
    if (!row.terms.empty()) model.rows.push_back(std::move(row));
  };

  for (int interval = 0; interval < inst.num_intervals(); ++interval) {
    energy_window_row(inst.interval_start(interval), inst.interval_end(interval) - 1,
                      inst.energy_limit_milli(interval), MasterRowKind::kIntervalLimit);
  }
  for (int deviation = 1; deviation <= inst.max_deviation(); ++deviation) {
    for (int interval = 0; interval < inst.num_intervals(); ++interval) {
      const int a = std::max(0, inst.interval_start(interval) - deviation);
      const int b = inst.interval_end(interval) - 1 - deviation;
      if (b < a) continue;
      energy_window_row(a, b, inst.energy_limit_milli(interval), MasterRowKind::kSingleDeviation);
    }
  }

  return model;
}

/// Integer start-time window [lo, hi] of one operation inside a cut.
struct CutInterval {
  int lo = 0;
  int hi = -1;

  bool empty() const { return lo > hi; }
  bool contains(int t) const { return lo <= t && t <= hi; }
};

/// No-good cut: at least one operation must start outside its interval,
/// i.e. the number of operations starting inside theirs is at most n-1.
struct Cut {
  std::vector<CutInterval> interval;  // id-indexed
  std::int64_t bound = 0;             // n - 1
};

namespace lbbd_detail {

/// Shared "keep the prefix order" intervals: each operation may start
/// anywhere from its candidate start up to just before its successor's
/// candidate completion.
inline CutInterval order_interval(const Instance& inst, const std::vector<int>& starts_by_pos,
                                  const Permutation& perm, int pos) {
  if (pos + 1 < perm.size()) {
    const Operation& next = inst.op(perm.at(pos + 1));
    return CutInterval{starts_by_pos[pos],
                       std::min(starts_by_pos[pos + 1] + next.processing - 1, inst.max_start())};
  }
  return CutInterval{starts_by_pos[pos], inst.max_start()};
}

/// Cutting intervals for a permutation no robust schedule exists for:
/// any schedule with all starts inside them keeps the forbidden order.
inline std::vector<CutInterval> infeasible_case_intervals(const Instance& inst,
                                                          const BaselineSchedule& candidate) {
  const int n = inst.n();
  std::vector<int> starts_by_pos(static_cast<std::size_t>(n));
  for (int pos = 0; pos < n; ++pos) starts_by_pos[pos] = candidate.start_of(candidate.perm.at(pos));
  std::vector<CutInterval> interval(static_cast<std::size_t>(n));
  for (int pos = 0; pos < n; ++pos) {
    interval[candidate.perm.at(pos) - 1] = order_interval(inst, starts_by_pos, candidate.perm, pos);
  }
  return interval;
}

/// Case "candidate start below the optimal": push the deviating operation
/// towards its earliest robust start; later operations must not slip in
/// front of it.
inline std::vector<CutInterval> pushed_right_intervals(const Instance& inst,
                                                       const BaselineSchedule& candidate,
                                                       const BaselineSchedule& optimal,
                                                       int deviating_pos) {
  const int n = inst.n();
  const Permutation& perm = candidate.perm;
  std::vector<int> starts_by_pos(static_cast<std::size_t>(n));
  for (int pos = 0; pos < n; ++pos) starts_by_pos[pos] = candidate.start_of(perm.at(pos));

  std::vector<CutInterval> interval(static_cast<std::size_t>(n));
  const int optimal_start = optimal.start_of(perm.at(deviating_pos));
  for (int pos = 0; pos < n; ++pos) {
    const int id = perm.at(pos);
    if (pos < deviating_pos) {
      interval[id - 1] = order_interval(inst, starts_by_pos, perm, pos);
    } else if (pos == deviating_pos) {
      if (pos == n - 1) {
        interval[id - 1] = CutInterval{starts_by_pos[pos], optimal_start - 1};
      } else {
        const Operation& next = inst.op(perm.at(pos + 1));
        interval[id - 1] = CutInterval{
            starts_by_pos[pos],
            std::min(optimal_start, starts_by_pos[pos + 1] + next.processing) - 1};
      }
    } else {
      const Operation& successor = inst.op(perm.at(deviating_pos + 1));
      const Operation& op = inst.op(id);
      interval[id - 1] = CutInterval{
          std::min(optimal_start,
                   starts_by_pos[deviating_pos + 1] + successor.processing - op.processing),
          inst.max_start()};
    }
  }
  return interval;
}

/// Case "candidate start above the optimal": pull the deviating operation
/// back towards its earliest robust start.
inline std::vector<CutInterval> pushed_left_intervals(const Instance& inst,
                                                      const BaselineSchedule& candidate,
                                                      const BaselineSchedule& optimal,
                                                      int deviating_pos) {
  const int n = inst.n();
  const Permutation& perm = candidate.perm;
  std::vector<int> starts_by_pos(static_cast<std::size_t>(n));
  for (int pos = 0; pos < n; ++pos) starts_by_pos[pos] = candidate.start_of(perm.at(pos));

  std::vector<CutInterval> interval(static_cast<std::size_t>(n));
  const int optimal_start = optimal.start_of(perm.at(deviating_pos));
  for (int pos = 0; pos < n; ++pos) {
    const int id = perm.at(pos);
    if (pos < deviating_pos) {
      interval[id - 1] = order_interval(inst, starts_by_pos, perm, pos);
    } else if (pos == deviating_pos) {
      interval[id - 1] = CutInterval{optimal_start + 1, starts_by_pos[pos]};
    } else {
      const Operation& op = inst.op(id);
      interval[id - 1] =
          CutInterval{starts_by_pos[deviating_pos] - op.processing + 1, inst.max_start()};
    }
  }
  return interval;
}

}  // namespace lbbd_detail

/// Builds the no-good cut for a non-robust candidate. Throws
/// ContractViolation if the candidate is actually robust. The returned cut
/// is violated by the candidate and never excludes the optimal robust
/// schedule of the candidate's permutation.
inline Cut generate_cut(const Instance& inst, const BaselineSchedule& candidate) {
  if (is_robust(inst, candidate).robust) {
    throw ContractViolation("cut requested for a robust candidate");
  }
  Cut cut;
  cut.bound = inst.n() - 1;

  FixedPermResult fixed = optimal_robust_schedule(inst, candidate.perm);
  if (fixed.status == FixedPermStatus::kInfeasible) {
    cut.interval = lbbd_detail::infeasible_case_intervals(inst, candidate);
    return cut;
  }

  const BaselineSchedule& optimal = *fixed.schedule;
  int deviating_pos = -1;
  for (int pos = 0; pos < inst.n(); ++pos) {
    const int id = candidate.perm.at(pos);
    if (candidate.start_of(id) != optimal.start_of(id)) {
      deviating_pos = pos;
      break;
    }
  }
  // Identical to the optimal robust schedule would mean the candidate is
  // robust, which was excluded above.
  assert(deviating_pos >= 0);

  const int id = candidate.perm.at(deviating_pos);
  if (candidate.start_of(id) < optimal.start_of(id)) {
    cut.interval = lbbd_detail::pushed_right_intervals(inst, candidate, optimal, deviating_pos);
  } else {
    cut.interval = lbbd_detail::pushed_left_intervals(inst, candidate, optimal, deviating_pos);
  }
  return cut;
}

struct LbbdOptions {
  std::optional<std::chrono::milliseconds> time_limit;
  std::optional<SolveResult> initial_ub;
  std::function<void(const BaselineSchedule&)> on_candidate;
  std::function<void(const BaselineSchedule&, const Cut&)> on_cut;
};

/// Solves via the adapter: lowers the master, then lazily vets every
/// integer candidate with the robustness check, injecting a no-good cut for
/// each non-robust one.
inline SolveResult lbbd_solve(const Instance& inst, milp::SolverAdapter& adapter,
                              const LbbdOptions& options = {}) {
  const auto started = std::chrono::steady_clock::now();
  const MasterModel model = build_master(inst);

  for (const MasterStartVar& var : model.vars) adapter.add_binary_var(var.objective);
  for (const MasterRow& row : model.rows) {
    milp::LinearConstraint constraint;
    constraint.sense = row.sense;
    constraint.rhs = row.rhs;
    constraint.terms.reserve(row.terms.size());
    for (const auto& [var, coeff] : row.terms) constraint.terms.push_back({var, coeff});
    adapter.add_linear_constraint(std::move(constraint));
  }
  if (options.initial_ub && options.initial_ub->status == SolveStatus::kFeasible) {
    // A feasible objective value caps the master objective without cutting
    // off any optimum.
    milp::LinearConstraint cap;
    cap.sense = milp::Sense::kLe;
    cap.rhs = options.initial_ub->objective;
    for (int v = 0; v < static_cast<int>(model.vars.size()); ++v) {
      if (model.vars[v].objective != 0) cap.terms.push_back({v, model.vars[v].objective});
    }
    adapter.add_linear_constraint(std::move(cap));
  }
  if (options.time_limit) adapter.set_time_limit(*options.time_limit);

  const auto reconstruct = [&](const std::vector<std::uint8_t>& values) {
    std::vector<int> start(static_cast<std::size_t>(inst.n()), -1);
    for (int v = 0; v < static_cast<int>(model.vars.size()); ++v) {
      if (values[v] >= 1) {
        const MasterStartVar& var = model.vars[v];
        if (start[var.id - 1] != -1) {
          throw ContractViolation("adapter set two start variables for one operation");
        }
        start[var.id - 1] = var.t;
      }
    }
    for (int s : start) {
      if (s < 0) throw ContractViolation("adapter left an operation without a start variable");
    }
    return make_baseline(inst, std::move(start));
  };

  std::int64_t cuts = 0;
  std::int64_t candidates = 0;
  milp::MilpOutcome outcome = adapter.solve_with_integer_callback(
      [&](const std::vector<std::uint8_t>& values) -> std::vector<milp::LinearConstraint> {
        BaselineSchedule candidate = reconstruct(values);
        ++candidates;
        if (options.on_candidate) options.on_candidate(candidate);
        if (is_robust(inst, candidate).robust) return {};
        Cut cut = generate_cut(inst, candidate);
        if (options.on_cut) options.on_cut(candidate, cut);
        ++cuts;
        milp::LinearConstraint constraint;
        constraint.sense = milp::Sense::kLe;
        constraint.rhs = cut.bound;
        for (int id = 1; id <= inst.n(); ++id) {
          const CutInterval& interval = cut.interval[id - 1];
          if (interval.empty()) continue;
          const Operation& op = inst.op(id);
          const int lo = std::max(interval.lo, op.release);
          const int hi = std::min(interval.hi, inst.max_start());
          for (int t = lo; t <= hi; ++t) {
            constraint.terms.push_back({model.var_index(id, t), 1});
          }
        }
        return {std::move(constraint)};
      });

  SolveResult result;
  result.counters["cuts"] = cuts;
  result.counters["candidates"] = candidates;
  result.counters["nodes"] = outcome.nodes;
  switch (outcome.status) {
    case milp::MilpStatus::kOptimal:
      result.status = SolveStatus::kFeasible;
      result.proven_optimal = true;
      break;
    case milp::MilpStatus::kInfeasible:
      result.status = SolveStatus::kInfeasible;
      break;
    case milp::MilpStatus::kTimedOut:
      result.status = SolveStatus::kTimedOut;
      break;
  }
  if (outcome.has_incumbent) {
    result.schedule = reconstruct(outcome.values);
    result.objective = total_tardiness(inst, *result.schedule);
    assert(result.objective == outcome.objective);
  }
  result.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace resched
