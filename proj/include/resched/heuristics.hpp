#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "resched/core.hpp"
#include "resched/fixed_perm.hpp"
#include "resched/solve_result.hpp"

// Heuristics over the space of permutations: the earliest-due-date rule, a
// greedy construction that grows the permutation position by position, and
// a tabu search over swap and insert moves. Every permutation is evaluated
// through the fixed-permutation algorithm, so every returned schedule is
// robust by construction.

namespace resched {

/// Operations ordered by (due, release, id), scheduled at their earliest
/// robust starts.
inline SolveResult edf_schedule(const Instance& inst) {
  const auto started = std::chrono::steady_clock::now();
  std::vector<int> order(static_cast<std::size_t>(inst.n()));
  for (int i = 0; i < inst.n(); ++i) order[i] = i + 1;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::tuple(inst.op(a).due, inst.op(a).release, a) <
           std::tuple(inst.op(b).due, inst.op(b).release, b);
  });
  FixedPermResult fixed = optimal_robust_schedule(inst, Permutation(std::move(order)));
  SolveResult result;
  if (fixed.status == FixedPermStatus::kFeasible) {
    result.status = SolveStatus::kFeasible;
    result.objective = total_tardiness(inst, *fixed.schedule);
    result.schedule = std::move(fixed.schedule);
  }
  result.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return result;
}

/// Greedy initial permutation: each position takes the operation whose
/// earliest robust start minimises a lower bound on the total tardiness of
/// the unassigned operations (the candidate's own tardiness plus everything
/// else packed, possibly overlapping, after it). Ties go to the candidate
/// completing earliest. Empty when some position admits no feasible
/// candidate.
inline std::optional<Permutation> greedy_initial(const Instance& inst) {
  const int n = inst.n();
  std::vector<int> order;
  order.reserve(n);
  std::vector<char> assigned(static_cast<std::size_t>(n) + 1, 0);
  PrefixSchedule prefix;

  for (int pos = 0; pos < n; ++pos) {
    std::int64_t best_bound = 0;
    int best_completion = 0;
    int best_id = 0;
    order.push_back(0);  // slot for the candidate
    for (int id = 1; id <= n; ++id) {
      if (assigned[id]) continue;
      order[pos] = id;
      if (extend_earliest_robust(inst, order, pos, prefix) == FixedPermStatus::kInfeasible) {
        continue;
      }
      const Operation& op = inst.op(id);
      const int completion = prefix.start[pos] + op.processing;
      prefix.pop();
      std::int64_t bound = std::max<std::int64_t>(0, completion - op.due);
      for (int other = 1; other <= n; ++other) {
        if (assigned[other] || other == id) continue;
        const Operation& rest = inst.op(other);
        bound += std::max<std::int64_t>(
            0, std::max(completion, rest.release) + rest.processing - rest.due);
      }
      if (best_id == 0 || bound < best_bound ||
          (bound == best_bound && completion <= best_completion)) {
        best_bound = bound;
        best_completion = completion;
        best_id = id;
      }
    }
    if (best_id == 0) return std::nullopt;
    order[pos] = best_id;
    assigned[best_id] = 1;
    extend_earliest_robust(inst, order, pos, prefix);
  }
  return Permutation(std::move(order));
}

struct TabuParams {
  int restarts = 5;       // including the initial run
  int iterations = 200;   // per run
  int neighbourhood = 50; // sampled moves per iteration
  int tabu_len = 5;
  std::optional<int> stop_no_improve;  // overrides `iterations` when set
  std::uint64_t seed = 0;
};

struct TabuHooks {
  /// Called with the permutation selected at the end of each iteration.
  std::function<void(const Permutation&)> on_step;
};

namespace tabu_detail {

inline std::uint64_t permutation_hash(const std::vector<int>& order) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int id : order) {
    h ^= static_cast<std::uint64_t>(id);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// FIFO of recently visited permutations, stored as hash plus the full
/// order for collision checks.
class TabuList {
 public:
  explicit TabuList(int capacity) : capacity_(capacity) {}

  bool contains(const std::vector<int>& order) const {
    const std::uint64_t h = permutation_hash(order);
    for (const auto& [hash, stored] : entries_) {
      if (hash == h && stored == order) return true;
    }
    return false;
  }

  void push(const std::vector<int>& order) {
    entries_.emplace_back(permutation_hash(order), order);
    if (static_cast<int>(entries_.size()) > capacity_) entries_.erase(entries_.begin());
  }

 private:
  int capacity_;
  std::vector<std::pair<std::uint64_t, std::vector<int>>> entries_;
};

/// Draws `count` distinct positions without replacement.
inline std::pair<int, int> two_distinct(std::mt19937_64& rng, int n) {
  const int first = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
  int second = static_cast<int>(rng() % static_cast<std::uint64_t>(n - 1));
  if (second >= first) ++second;
  return {first, second};
}

inline std::vector<int> random_neighbour(std::mt19937_64& rng, const std::vector<int>& order) {
  std::vector<int> next = order;
  const int n = static_cast<int>(order.size());
  const auto [a, b] = two_distinct(rng, n);
  if (rng() % 2 == 0) {
    std::swap(next[a], next[b]);
  } else {
    // Move the operation at position a so it ends up at position b; with
    // a != b this never reproduces the input order.
    const int id = next[a];
    next.erase(next.begin() + a);
    next.insert(next.begin() + b, id);
  }
  return next;
}

}  // namespace tabu_detail

/// Tabu search seeded by the greedy permutation (earliest-due-date order as
/// a fallback), then restarted from random feasible shuffles. Each
/// iteration samples `neighbourhood` random swap-or-insert moves, evaluates
/// them through the fixed-permutation algorithm, and moves to the best
/// non-tabu feasible neighbour; visited permutations enter a FIFO tabu
/// list. Deterministic for a fixed (instance, params, seed).
inline SolveResult tabu_search(const Instance& inst, const TabuParams& params,
                               const TabuHooks& hooks = {}) {
  if (params.restarts < 1 || params.iterations < 1 || params.neighbourhood < 1 ||
      params.tabu_len < 1 || (params.stop_no_improve && *params.stop_no_improve < 1)) {
    throw std::invalid_argument("tabu parameters must be positive");
  }
  const auto started = std::chrono::steady_clock::now();
  std::mt19937_64 rng(params.seed ^ 0x7ab5ULL);

  SolveResult result;
  result.status = SolveStatus::kInfeasible;
  std::int64_t evaluations = 0;
  std::int64_t iterations_total = 0;
  int runs_executed = 0;

  const auto evaluate = [&](const std::vector<int>& order)
      -> std::optional<std::pair<std::int64_t, BaselineSchedule>> {
    ++evaluations;
    FixedPermResult fixed = optimal_robust_schedule(inst, Permutation(order));
    if (fixed.status != FixedPermStatus::kFeasible) return std::nullopt;
    std::int64_t objective = total_tardiness(inst, *fixed.schedule);
    return std::pair(objective, std::move(*fixed.schedule));
  };

  const auto consider_best = [&](std::int64_t objective, const BaselineSchedule& schedule) {
    if (result.status == SolveStatus::kInfeasible || objective < result.objective) {
      result.status = SolveStatus::kFeasible;
      result.objective = objective;
      result.schedule = schedule;
      return true;
    }
    return false;
  };

  for (int run = 0; run < params.restarts; ++run) {
    // Starting permutation: greedy for the first run with the due-date
    // order as fallback, random feasible shuffles afterwards (up to 100
    // tries, else the restart is skipped).
    std::optional<std::vector<int>> start_order;
    if (run == 0) {
      if (std::optional<Permutation> greedy = greedy_initial(inst)) {
        start_order = greedy->order();
      } else if (SolveResult edf = edf_schedule(inst); edf.status == SolveStatus::kFeasible) {
        start_order = edf.schedule->perm.order();
      }
    }
    if (!start_order) {
      std::vector<int> order(static_cast<std::size_t>(inst.n()));
      for (int i = 0; i < inst.n(); ++i) order[i] = i + 1;
      for (int attempt = 0; attempt < 100; ++attempt) {
        std::shuffle(order.begin(), order.end(), rng);
        if (optimal_robust_schedule(inst, Permutation(order)).status ==
            FixedPermStatus::kFeasible) {
          start_order = order;
          break;
        }
      }
    }
    if (!start_order) continue;
    ++runs_executed;

    std::vector<int> current = *start_order;
    if (auto evaluated = evaluate(current)) consider_best(evaluated->first, evaluated->second);
    tabu_detail::TabuList tabu(params.tabu_len);
    tabu.push(current);

    int since_improvement = 0;
    for (int iteration = 0;; ++iteration) {
      if (params.stop_no_improve) {
        if (since_improvement >= *params.stop_no_improve) break;
      } else if (iteration >= params.iterations) {
        break;
      }
      ++iterations_total;

      // Sample the whole neighbourhood first so move generation consumes a
      // deterministic number of draws regardless of evaluation outcomes.
      std::vector<std::vector<int>> moves;
      moves.reserve(static_cast<std::size_t>(params.neighbourhood));
      for (int k = 0; k < params.neighbourhood; ++k) {
        moves.push_back(tabu_detail::random_neighbour(rng, current));
      }

      std::optional<std::int64_t> best_objective;
      std::vector<int>* best_move = nullptr;
      BaselineSchedule best_schedule;
      for (std::vector<int>& move : moves) {
        if (tabu.contains(move)) continue;
        auto evaluated = evaluate(move);
        if (!evaluated) continue;
        if (!best_objective || evaluated->first < *best_objective ||
            (evaluated->first == *best_objective && move < *best_move)) {
          best_objective = evaluated->first;
          best_move = &move;
          best_schedule = std::move(evaluated->second);
        }
      }

      const bool improved =
          best_objective && consider_best(*best_objective, best_schedule);
      since_improvement = improved ? 0 : since_improvement + 1;
      if (!best_objective) continue;  // all neighbours tabu or infeasible

      current = *best_move;
      tabu.push(current);
      if (hooks.on_step) hooks.on_step(Permutation(current));
    }
  }

  result.proven_optimal = false;
  result.counters["evaluations"] = evaluations;
  result.counters["iterations"] = iterations_total;
  result.counters["restarts"] = runs_executed;
  result.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace resched
