#pragma once

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "resched/milp/adapter.hpp"

// Reference SolverAdapter: an exact depth-first solver for pure-binary
// minimization models.
//
// Structure exploited: "exactly-one" constraints (equality, rhs 1, all unit
// coefficients) form variable groups; the search branches over one group's
// options at a time in ascending objective order, backed by incremental
// bound propagation on every row and an objective bound of accrued cost
// plus the cheapest unassigned option per group. Lazy constraints injected
// at candidate acceptance join the row set mid-search, which only removes
// solutions; accepted incumbents stay valid because acceptance happens
// after the callback vetted them.

namespace resched::milp {

class DfsMilpSolver final : public SolverAdapter {
 public:
  int add_binary_var(std::int64_t objective_coeff) override {
    vars_.push_back(Var{objective_coeff, -1, {}});
    return static_cast<int>(vars_.size()) - 1;
  }

  void add_linear_constraint(LinearConstraint constraint) override {
    initial_rows_.push_back(std::move(constraint));
  }

  void set_time_limit(std::chrono::milliseconds limit) override { time_limit_ = limit; }

  MilpOutcome solve_with_integer_callback(const IntegerCallback& callback) override {
    started_ = std::chrono::steady_clock::now();
    out_of_time_ = false;
    nodes_ = 0;
    rows_.clear();
    row_queued_.clear();
    trail_.clear();
    accrued_ = 0;
    incumbent_.reset();
    objective_cap_row_.reset();

    value_.assign(vars_.size(), kUnassigned);
    for (Var& var : vars_) {
      var.occurrences.clear();
      var.group = -1;
    }
    groups_.clear();

    for (const LinearConstraint& constraint : initial_rows_) add_row(constraint);
    detect_groups();

    // Root propagation; an immediate conflict means the model is infeasible.
    bool feasible = true;
    for (int row = 0; row < static_cast<int>(rows_.size()) && feasible; ++row) {
      feasible = enqueue_and_propagate(row);
    }
    if (feasible) dfs(callback);

    MilpOutcome outcome;
    outcome.nodes = nodes_;
    if (incumbent_) {
      outcome.has_incumbent = true;
      outcome.values = incumbent_->values;
      outcome.objective = incumbent_->objective;
      outcome.status = out_of_time_ ? MilpStatus::kTimedOut : MilpStatus::kOptimal;
    } else {
      outcome.status = out_of_time_ ? MilpStatus::kTimedOut : MilpStatus::kInfeasible;
    }
    return outcome;
  }

 private:
  static constexpr std::int8_t kUnassigned = -1;

  struct Var {
    std::int64_t objective = 0;
    int group = -1;
    std::vector<std::pair<int, std::int64_t>> occurrences;  // (row, coeff)
  };

  struct Row {
    std::vector<LinearTerm> terms;
    Sense sense = Sense::kLe;
    std::int64_t rhs = 0;
    std::int64_t min_possible = 0;
    std::int64_t max_possible = 0;
  };

  struct Group {
    std::vector<int> options;  // sorted by (objective, var)
    int unassigned = 0;
    int chosen = 0;  // number of options currently set to 1
  };

  struct Incumbent {
    std::vector<std::uint8_t> values;
    std::int64_t objective = 0;
  };

  void add_row(const LinearConstraint& constraint) {
    Row row;
    row.terms = constraint.terms;
    row.sense = constraint.sense;
    row.rhs = constraint.rhs;
    for (const LinearTerm& term : row.terms) {
      if (value_[term.var] == kUnassigned) {
        row.min_possible += std::min<std::int64_t>(0, term.coeff);
        row.max_possible += std::max<std::int64_t>(0, term.coeff);
      } else {
        row.min_possible += term.coeff * value_[term.var];
        row.max_possible += term.coeff * value_[term.var];
      }
      vars_[term.var].occurrences.emplace_back(static_cast<int>(rows_.size()), term.coeff);
    }
    rows_.push_back(std::move(row));
    row_queued_.push_back(0);
  }

  /// Only strictly better assignments than the incumbent are of interest,
  /// so the objective itself becomes a row the propagation can filter on.
  void tighten_objective_cap() {
    if (!incumbent_) return;
    if (objective_cap_row_) {
      rows_[*objective_cap_row_].rhs = incumbent_->objective - 1;
      return;
    }
    LinearConstraint cap;
    cap.sense = Sense::kLe;
    cap.rhs = incumbent_->objective - 1;
    for (int var = 0; var < static_cast<int>(vars_.size()); ++var) {
      if (vars_[var].objective != 0) cap.terms.push_back({var, vars_[var].objective});
    }
    if (cap.terms.empty()) return;
    objective_cap_row_ = static_cast<int>(rows_.size());
    add_row(cap);
  }

  void detect_groups() {
    for (const Row& row : rows_) {
      if (row.sense != Sense::kEq || row.rhs != 1 || row.terms.size() < 2) continue;
      bool unit = true;
      for (const LinearTerm& term : row.terms) {
        if (term.coeff != 1 || vars_[term.var].group != -1) unit = false;
      }
      if (!unit) continue;
      Group group;
      for (const LinearTerm& term : row.terms) {
        group.options.push_back(term.var);
        vars_[term.var].group = static_cast<int>(groups_.size());
      }
      std::sort(group.options.begin(), group.options.end(), [&](int a, int b) {
        return std::pair(vars_[a].objective, a) < std::pair(vars_[b].objective, b);
      });
      group.unassigned = static_cast<int>(group.options.size());
      groups_.push_back(std::move(group));
    }
  }

  bool row_infeasible(const Row& row) const {
    switch (row.sense) {
      case Sense::kLe: return row.min_possible > row.rhs;
      case Sense::kGe: return row.max_possible < row.rhs;
      case Sense::kEq: return row.min_possible > row.rhs || row.max_possible < row.rhs;
    }
    return false;
  }

  /// Applies an assignment, updating row bounds and group counters.
  void apply(int var, std::int8_t val) {
    assert(value_[var] == kUnassigned);
    value_[var] = val;
    trail_.push_back(var);
    if (val == 1) accrued_ += vars_[var].objective;
    if (vars_[var].group >= 0) {
      Group& group = groups_[vars_[var].group];
      --group.unassigned;
      if (val == 1) ++group.chosen;
    }
    for (const auto& [row_index, coeff] : vars_[var].occurrences) {
      Row& row = rows_[row_index];
      row.min_possible += coeff * val - std::min<std::int64_t>(0, coeff);
      row.max_possible += coeff * val - std::max<std::int64_t>(0, coeff);
    }
  }

  void undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
      const int var = trail_.back();
      trail_.pop_back();
      const std::int8_t val = value_[var];
      value_[var] = kUnassigned;
      if (val == 1) accrued_ -= vars_[var].objective;
      if (vars_[var].group >= 0) {
        Group& group = groups_[vars_[var].group];
        ++group.unassigned;
        if (val == 1) --group.chosen;
      }
      for (const auto& [row_index, coeff] : vars_[var].occurrences) {
        Row& row = rows_[row_index];
        row.min_possible -= coeff * val - std::min<std::int64_t>(0, coeff);
        row.max_possible -= coeff * val - std::max<std::int64_t>(0, coeff);
      }
    }
  }

  /// Assigns and propagates to a fixpoint. Returns false on conflict.
  bool assign_and_propagate(int var, std::int8_t val) {
    apply(var, val);
    std::vector<int> queue;
    for (const auto& [row_index, coeff] : vars_[var].occurrences) {
      if (!row_queued_[row_index]) {
        row_queued_[row_index] = 1;
        queue.push_back(row_index);
      }
    }
    return propagate(std::move(queue));
  }

  bool enqueue_and_propagate(int row_index) {
    if (row_queued_[row_index]) return true;
    row_queued_[row_index] = 1;
    return propagate({row_index});
  }

  bool propagate(std::vector<int> queue) {
    const auto fail = [&]() {
      for (int row : queue) row_queued_[row] = 0;
      return false;
    };
    while (!queue.empty()) {
      const int row_index = queue.back();
      queue.pop_back();
      row_queued_[row_index] = 0;
      Row& row = rows_[row_index];
      if (row_infeasible(row)) {
        return fail();
      }
      for (const LinearTerm& term : row.terms) {
        if (value_[term.var] != kUnassigned) continue;
        std::optional<std::int8_t> forced;
        const std::int64_t c = term.coeff;
        if (row.sense == Sense::kLe || row.sense == Sense::kEq) {
          if (c > 0 && row.min_possible + c > row.rhs) forced = 0;
          if (c < 0 && row.min_possible - c > row.rhs) forced = 1;
        }
        if (!forced && (row.sense == Sense::kGe || row.sense == Sense::kEq)) {
          if (c > 0 && row.max_possible - c < row.rhs) forced = 1;
          if (c < 0 && row.max_possible + c < row.rhs) forced = 0;
        }
        if (!forced) continue;
        apply(term.var, *forced);
        // A group emptied of options, or given a second chosen option,
        // shows up as a conflict on its own exactly-one row.
        for (const auto& [other_row, other_coeff] : vars_[term.var].occurrences) {
          if (!row_queued_[other_row]) {
            row_queued_[other_row] = 1;
            queue.push_back(other_row);
          }
        }
      }
    }
    return true;
  }

  std::int64_t lower_bound() const {
    std::int64_t bound = accrued_;
    for (const Group& group : groups_) {
      if (group.chosen > 0) continue;
      std::int64_t best = 0;
      bool found = false;
      for (int var : group.options) {
        if (value_[var] == kUnassigned) {
          best = vars_[var].objective;  // options are cost-sorted
          found = true;
          break;
        }
      }
      if (found) bound += best;
    }
    for (std::size_t var = 0; var < vars_.size(); ++var) {
      if (value_[var] == kUnassigned && vars_[var].group == -1 && vars_[var].objective < 0) {
        bound += vars_[var].objective;
      }
    }
    return bound;
  }

  bool over_time() {
    if (!time_limit_) return false;
    if ((nodes_ & 255) == 1 &&
        std::chrono::steady_clock::now() - started_ > *time_limit_) {
      out_of_time_ = true;
    }
    return out_of_time_;
  }

  /// Next decision: the unchosen group with the fewest open options, then
  /// the lowest-index unassigned ungrouped variable.
  void dfs(const IntegerCallback& callback) {
    if (out_of_time_) return;
    if (incumbent_ && lower_bound() >= incumbent_->objective) return;

    int best_group = -1;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const Group& group = groups_[g];
      if (group.chosen > 0) continue;
      if (best_group == -1 || group.unassigned < groups_[best_group].unassigned) {
        best_group = static_cast<int>(g);
      }
    }

    int branch_var = -1;
    std::int8_t first_value = 1;
    if (best_group >= 0) {
      // Cheapest open option of the group; taking it is the left branch.
      for (int var : groups_[best_group].options) {
        if (value_[var] == kUnassigned) {
          branch_var = var;
          break;
        }
      }
      assert(branch_var != -1);  // an open group always has an open option
    } else {
      for (std::size_t var = 0; var < vars_.size(); ++var) {
        if (value_[var] == kUnassigned) {
          branch_var = static_cast<int>(var);
          break;
        }
      }
      if (branch_var != -1) first_value = vars_[branch_var].objective > 0 ? 0 : 1;
    }

    if (branch_var == -1) {
      // Full assignment; vet through the callback before acceptance.
      std::vector<std::uint8_t> values(vars_.size());
      for (std::size_t var = 0; var < vars_.size(); ++var) values[var] = value_[var] == 1 ? 1 : 0;
      if (callback) {
        std::vector<LinearConstraint> cuts = callback(values);
        if (!cuts.empty()) {
          for (const LinearConstraint& cut : cuts) add_row(cut);
          return;  // rejected; the new rows now constrain the rest of the search
        }
      }
      incumbent_ = Incumbent{std::move(values), accrued_};
      tighten_objective_cap();
      return;
    }

    for (const std::int8_t val : {first_value, static_cast<std::int8_t>(1 - first_value)}) {
      ++nodes_;
      if (over_time()) break;
      const std::size_t mark = trail_.size();
      if (assign_and_propagate(branch_var, val)) {
        dfs(callback);
      }
      undo_to(mark);
      if (out_of_time_) break;
    }
  }

  std::vector<Var> vars_;
  std::vector<LinearConstraint> initial_rows_;
  std::vector<Row> rows_;
  std::vector<char> row_queued_;
  std::vector<Group> groups_;
  std::vector<std::int8_t> value_;
  std::vector<int> trail_;
  std::int64_t accrued_ = 0;
  std::optional<Incumbent> incumbent_;
  std::optional<int> objective_cap_row_;
  std::optional<std::chrono::milliseconds> time_limit_;
  std::chrono::steady_clock::time_point started_;
  bool out_of_time_ = false;
  std::int64_t nodes_ = 0;
};

}  // namespace resched::milp
