#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "resched/core.hpp"
#include "resched/fixed_perm.hpp"
#include "resched/solve_result.hpp"

// Depth-first Branch-and-Bound over partial permutations. Each node extends
// the prefix with one unscheduled operation at its earliest robust start;
// children are ordered by ascending due date. Subtrees are pruned when the
// extension is infeasible or when the prefix tardiness plus a preemptive
// lower bound on the remaining operations cannot beat the incumbent.

namespace resched {

/// Lower bound on the total tardiness of `remaining` operations, none of
/// which can start before `available_from`: schedule them preemptively by
/// shortest remaining processing time, then pair sorted completion times
/// with sorted due dates.
inline std::int64_t chu_lower_bound(const Instance& inst, const std::vector<int>& remaining,
                                    int available_from) {
  if (remaining.empty()) return 0;

  struct Job {
    int id;
    int release;
    int left;
  };
  std::vector<Job> jobs;
  jobs.reserve(remaining.size());
  for (int id : remaining) {
    jobs.push_back(Job{id, std::max(inst.op(id).release, available_from), inst.op(id).processing});
  }
  std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    return std::pair(a.release, a.id) < std::pair(b.release, b.id);
  });

  std::vector<int> completions;
  completions.reserve(jobs.size());
  std::size_t next_release = 0;
  std::vector<std::size_t> active;  // indices into jobs, released and unfinished
  int now = jobs.front().release;
  while (completions.size() < jobs.size()) {
    while (next_release < jobs.size() && jobs[next_release].release <= now) {
      active.push_back(next_release++);
    }
    if (active.empty()) {
      now = jobs[next_release].release;
      continue;
    }
    // Shortest remaining time first; ties towards the smaller id.
    std::size_t best = active.front();
    std::size_t best_at = 0;
    for (std::size_t k = 1; k < active.size(); ++k) {
      const Job& a = jobs[active[k]];
      const Job& b = jobs[best];
      if (std::pair(a.left, a.id) < std::pair(b.left, b.id)) {
        best = active[k];
        best_at = k;
      }
    }
    const int horizon = next_release < jobs.size() ? jobs[next_release].release
                                                   : now + jobs[best].left;
    const int run = std::min(jobs[best].left, horizon - now);
    jobs[best].left -= run;
    now += run;
    if (jobs[best].left == 0) {
      completions.push_back(now);
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_at));
    }
  }

  std::vector<int> dues;
  dues.reserve(remaining.size());
  for (int id : remaining) dues.push_back(inst.op(id).due);
  std::sort(dues.begin(), dues.end());
  std::sort(completions.begin(), completions.end());
  std::int64_t bound = 0;
  for (std::size_t k = 0; k < dues.size(); ++k) {
    bound += std::max(0, completions[k] - dues[k]);
  }
  return bound;
}

struct BbLimits {
  std::optional<std::chrono::milliseconds> time_limit;
  std::optional<std::int64_t> node_limit;
  bool use_chu_bound = true;
};

struct BbHooks {
  std::function<void(std::int64_t objective)> on_incumbent;
};

inline SolveResult bb_solve(const Instance& inst, const std::optional<SolveResult>& initial_ub,
                            const BbLimits& limits = {}, const BbHooks& hooks = {}) {
  const auto started = std::chrono::steady_clock::now();
  const int n = inst.n();

  SolveResult result;
  result.status = SolveStatus::kInfeasible;
  if (initial_ub && initial_ub->schedule) {
    result.status = SolveStatus::kFeasible;
    result.schedule = initial_ub->schedule;
    result.objective = initial_ub->objective;
  }

  std::vector<int> order;  // prefix, by position
  order.reserve(n);
  std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
  PrefixSchedule prefix;
  std::int64_t nodes = 0;
  bool out_of_budget = false;

  const auto over_budget = [&]() {
    if (limits.node_limit && nodes > *limits.node_limit) return true;
    if (limits.time_limit && (nodes & 255) == 1 &&
        std::chrono::steady_clock::now() - started > *limits.time_limit) {
      return true;
    }
    return false;
  };

  const std::function<void(std::int64_t)> dfs = [&](std::int64_t prefix_tardiness) {
    if (out_of_budget) return;
    const int pos = static_cast<int>(order.size());
    if (pos == n) {
      if (result.status == SolveStatus::kInfeasible || prefix_tardiness < result.objective) {
        std::vector<int> start(static_cast<std::size_t>(n));
        for (int q = 0; q < n; ++q) start[order[q] - 1] = prefix.start[q];
        result.status = SolveStatus::kFeasible;
        result.schedule = BaselineSchedule{std::move(start), Permutation(order)};
        result.objective = prefix_tardiness;
        if (hooks.on_incumbent) hooks.on_incumbent(prefix_tardiness);
      }
      return;
    }

    // Children by ascending due date, ties by id.
    std::vector<int> children;
    children.reserve(static_cast<std::size_t>(n - pos));
    for (int id = 1; id <= n; ++id) {
      if (!used[id]) children.push_back(id);
    }
    std::sort(children.begin(), children.end(), [&](int a, int b) {
      return std::pair(inst.op(a).due, a) < std::pair(inst.op(b).due, b);
    });

    for (int id : children) {
      if (out_of_budget) return;
      ++nodes;
      if (over_budget()) {
        out_of_budget = true;
        return;
      }
      order.push_back(id);
      if (extend_earliest_robust(inst, order, pos, prefix) ==
          FixedPermStatus::kFeasible) {
        const Operation& op = inst.op(id);
        const std::int64_t tardiness =
            prefix_tardiness + std::max(0, prefix.start[pos] + op.processing - op.due);
        std::int64_t bound = tardiness;
        if (limits.use_chu_bound && pos + 1 < n) {
          std::vector<int> remaining;
          remaining.reserve(static_cast<std::size_t>(n - pos - 1));
          for (int other = 1; other <= n; ++other) {
            if (!used[other] && other != id) remaining.push_back(other);
          }
          bound += chu_lower_bound(inst, remaining, prefix.start[pos] + op.processing);
        }
        if (result.status == SolveStatus::kInfeasible || bound < result.objective) {
          used[id] = 1;
          dfs(tardiness);
          used[id] = 0;
        }
        prefix.pop();
      }
      order.pop_back();
    }
  };

  dfs(0);

  if (out_of_budget) {
    // Neither optimality nor infeasibility is proven on a cut-off search.
    result.proven_optimal = false;
    result.status = SolveStatus::kTimedOut;
  } else {
    result.proven_optimal = result.status == SolveStatus::kFeasible;
  }
  result.counters["nodes"] = nodes;
  result.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace resched
