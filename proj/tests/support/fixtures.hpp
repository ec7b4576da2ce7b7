#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "resched/core.hpp"

// Shared test fixtures and small generators.

namespace resched::testing {

/// Five-operation instance used throughout the worked examples: D=15, five
/// metering intervals, limit 1200 everywhere, max deviation 3.
inline Instance worked_instance() {
  std::vector<Operation> ops{
      {1, 0, 2, 5, 50 * kMilli},
      {2, 6, 2, 10, 70 * kMilli},
      {3, 8, 7, 15, 150 * kMilli},
      {4, 10, 4, 17, 120 * kMilli},
      {5, 18, 3, 30, 30 * kMilli},
  };
  return Instance(std::move(ops), 15, std::vector<EnergyMilli>(5, 1200 * kMilli), 3);
}

inline BaselineSchedule worked_baseline(const Instance& inst) {
  return make_baseline(inst, {0, 6, 9, 16, 20});
}

/// Four-operation motivating fixture: the baseline satisfies every limit,
/// but delaying operation 2 by 3 pushes the second interval over its limit.
/// D=10, four intervals, limit 1000, max deviation 3.
inline Instance motivating_instance() {
  std::vector<Operation> ops{
      {1, 0, 5, 10, 80 * kMilli},
      {2, 0, 5, 20, 120 * kMilli},
      {3, 0, 5, 30, 100 * kMilli},
      {4, 0, 5, 40, 80 * kMilli},
  };
  return Instance(std::move(ops), 10, std::vector<EnergyMilli>(4, 1000 * kMilli), 3);
}

inline BaselineSchedule motivating_baseline(const Instance& inst) {
  return make_baseline(inst, {0, 5, 10, 15});
}

/// Random valid baseline for property tests: random permutation, then starts
/// chained with random gaps, clamped to the max start. Returns nullopt-like
/// empty when the chain does not fit (callers retry with the next seed).
inline std::optional<BaselineSchedule> random_baseline(const Instance& inst, std::uint64_t seed,
                                                       int max_gap = 4) {
  std::mt19937_64 rng(seed);
  std::vector<int> order(static_cast<std::size_t>(inst.n()));
  for (int i = 0; i < inst.n(); ++i) order[i] = i + 1;
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_int_distribution<int> gap(0, max_gap);
  std::vector<int> start(static_cast<std::size_t>(inst.n()));
  int free_at = 0;
  for (int pos = 0; pos < inst.n(); ++pos) {
    const Operation& op = inst.op(order[pos]);
    const int s = std::max(op.release, free_at) + gap(rng);
    if (s > inst.max_start()) return std::nullopt;
    start[op.id - 1] = s;
    free_at = s + op.processing;
  }
  return make_baseline(inst, std::move(start));
}

}  // namespace resched::testing
