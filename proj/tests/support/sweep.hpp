#pragma once

#include <cstdint>
#include <random>

#include "resched/core.hpp"
#include "resched/instance_gen.hpp"

// Deterministic small-instance sweeps shared by the oracle tests. Small
// horizons keep the exhaustive oracles fast.

namespace resched::testing {

inline Instance sweep_instance(int n, int dmax, int seed, int interval_length = 8,
                               int intervals_per_op = 2) {
  static constexpr double kAlpha1[] = {0.6, 0.9};
  static constexpr double kAlpha2[] = {0.1, 0.3};
  static constexpr double kAlpha3[] = {0.1, 0.3, 0.5};
  GenConfig cfg;
  cfg.n = n;
  cfg.max_deviation = dmax;
  cfg.interval_length = interval_length;
  cfg.intervals_per_op = intervals_per_op;
  cfg.energy_limit = 100.0;
  cfg.alpha1 = kAlpha1[seed % 2];
  cfg.alpha2 = kAlpha2[(seed / 2) % 2];
  cfg.alpha3 = kAlpha3[(seed / 4) % 3];
  cfg.seed = 0x5EED0000ULL + static_cast<std::uint64_t>(seed);
  return generate_instance(cfg).instance;
}

inline Permutation sweep_permutation(int n, int seed) {
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[i] = i + 1;
  std::mt19937_64 rng(0xC0FFEEULL + static_cast<std::uint64_t>(seed));
  std::shuffle(order.begin(), order.end(), rng);
  return Permutation(std::move(order));
}

}  // namespace resched::testing
