#include <catch2/catch_amalgamated.hpp>

#include <chrono>

#include "resched/fixed_perm.hpp"
#include "resched/verify.hpp"
#include "support/fixtures.hpp"
#include "support/sweep.hpp"

using namespace resched;
using resched::testing::worked_instance;

TEST_CASE("optimal robust schedule on the worked instance") {
  Instance inst = worked_instance();
  FixedPermResult result = optimal_robust_schedule(inst, Permutation::identity(5));
  REQUIRE(result.status == FixedPermStatus::kFeasible);
  // Frozen after cross-checking against the naive algorithm and full
  // scenario enumeration below.
  CHECK(result.schedule->start == std::vector<int>{0, 6, 9, 28, 32});
  CHECK(total_tardiness(inst, *result.schedule) == 21);
  CHECK(brute_force_is_robust(inst, *result.schedule).robust);
}

TEST_CASE("first position with no energy conflict starts at its release") {
  Instance inst = worked_instance();
  PrefixSchedule prefix;
  REQUIRE(extend_earliest_robust(inst, Permutation::identity(5).order(), 0, prefix) ==
          FixedPermStatus::kFeasible);
  CHECK(prefix.start[0] == 0);

  PrefixSchedule naive;
  REQUIRE(extend_earliest_robust_naive(inst, Permutation::identity(5).order(), 0, naive) ==
          FixedPermStatus::kFeasible);
  CHECK(naive.start[0] == 0);
}

TEST_CASE("zero deviation reduces to the non-robust limit check") {
  // With max deviation zero the earliest robust start is the first start
  // whose baseline prefix satisfies every interval limit.
  for (int seed = 0; seed < 60; ++seed) {
    Instance inst = resched::testing::sweep_instance(4, 0, seed);
    Permutation perm = Permutation::identity(4);
    PrefixSchedule fast;
    PrefixSchedule reference;
    bool fast_ok = true;
    bool ref_ok = true;
    for (int pos = 0; pos < 4 && fast_ok && ref_ok; ++pos) {
      fast_ok = extend_earliest_robust(inst, perm.order(), pos, fast) == FixedPermStatus::kFeasible;
      // Direct scan: increment until the prefix satisfies every limit.
      if (!ref_ok || !fast_ok) break;
      int s = pos == 0 ? inst.op(perm.at(pos)).release
                       : std::max(inst.op(perm.at(pos)).release,
                                  reference.start[pos - 1] + inst.op(perm.at(pos - 1)).processing);
      ref_ok = false;
      for (; s <= inst.max_start(); ++s) {
        bool violated = false;
        for (int interval = 0; interval < inst.num_intervals() && !violated; ++interval) {
          EnergyMilli total = static_cast<EnergyMilli>(operation_interval_intersection(
                                  inst, interval, perm.at(pos), s)) *
                              inst.op(perm.at(pos)).power_milli;
          for (int q = 0; q < pos; ++q) {
            total += static_cast<EnergyMilli>(operation_interval_intersection(
                         inst, interval, perm.at(q), reference.start[q])) *
                     inst.op(perm.at(q)).power_milli;
          }
          violated = total > inst.energy_limit_milli(interval);
        }
        if (!violated) {
          reference.push(s, s);
          ref_ok = true;
          break;
        }
      }
      if (fast_ok && ref_ok) REQUIRE(fast.start[pos] == reference.start[pos]);
    }
    REQUIRE(fast_ok == ref_ok);
  }
}

TEST_CASE("an operation that violates a limit in every alignment is infeasible") {
  // p = 2D guarantees a fully covered interval wherever the operation is
  // placed, and D * P exceeds the limit, so step 2 pushes the start past
  // the max start.
  std::vector<Operation> ops{{1, 0, 20, 10, 11 * kMilli}};
  Instance inst(std::move(ops), 10, std::vector<EnergyMilli>(4, 100 * kMilli), 0);
  FixedPermResult result = optimal_robust_schedule(inst, Permutation::identity(1));
  CHECK(result.status == FixedPermStatus::kInfeasible);
}

TEST_CASE("naive start computation refuses oversized scenario spaces") {
  Instance inst = resched::testing::sweep_instance(5, 3, 31);
  PrefixSchedule prefix;
  Permutation perm = Permutation::identity(5);
  for (int pos = 0; pos < 4; ++pos) {
    REQUIRE(extend_earliest_robust(inst, perm.order(), pos, prefix) ==
            FixedPermStatus::kFeasible);
  }
  // Position 4 would need (3+1)^5 = 1024 scenarios.
  CHECK_THROWS_AS(extend_earliest_robust_naive(inst, perm.order(), 4, prefix, 1000),
                  BudgetExceeded);
}

TEST_CASE("optimised and naive algorithms agree position by position") {
  int instances = 0;
  for (int seed = 0; seed < 120; ++seed) {
    const int n = 3 + seed % 3;           // 3..5
    const int dmax = (seed / 3) % 3;      // 0..2
    Instance inst = resched::testing::sweep_instance(n, dmax, seed);
    for (int variant = 0; variant < 2; ++variant) {
      Permutation perm = resched::testing::sweep_permutation(n, seed * 2 + variant);
      PrefixSchedule fast;
      PrefixSchedule naive;
      for (int pos = 0; pos < n; ++pos) {
        FixedPermStatus a = extend_earliest_robust(inst, perm.order(), pos, fast);
        FixedPermStatus b = extend_earliest_robust_naive(inst, perm.order(), pos, naive);
        REQUIRE(a == b);
        if (a == FixedPermStatus::kInfeasible) break;
        REQUIRE(fast.start[pos] == naive.start[pos]);
      }
    }
    ++instances;
  }
  CHECK(instances == 120);
}

TEST_CASE("feasible schedules are robust and have monotone prefix starts") {
  for (int seed = 0; seed < 80; ++seed) {
    const int n = 3 + seed % 4;
    const int dmax = seed % 4;
    Instance inst = resched::testing::sweep_instance(n, dmax, 500 + seed);
    Permutation perm = resched::testing::sweep_permutation(n, seed);
    FixedPermResult result = optimal_robust_schedule(inst, perm);
    if (result.status != FixedPermStatus::kFeasible) continue;
    CHECK(!validate_baseline(inst, result.schedule->start));
    CHECK(brute_force_is_robust(inst, *result.schedule).robust);
    for (int pos = 0; pos + 1 < n; ++pos) {
      const int id = perm.at(pos);
      const int next = perm.at(pos + 1);
      CHECK(result.schedule->start_of(id) + inst.op(id).processing <=
            result.schedule->start_of(next));
    }
  }
}

TEST_CASE("earliest-start optimality against grid enumeration") {
  // No robust schedule with the same permutation has strictly smaller total
  // tardiness; checked by enumerating every non-overlapping start grid.
  int verified = 0;
  for (int seed = 0; seed < 12; ++seed) {
    Instance inst = resched::testing::sweep_instance(3, 1 + seed % 2, 900 + seed, 6, 2);
    Permutation perm = resched::testing::sweep_permutation(3, seed);
    FixedPermResult result = optimal_robust_schedule(inst, perm);
    if (result.status != FixedPermStatus::kFeasible) continue;
    const std::int64_t best = total_tardiness(inst, *result.schedule);
    std::vector<int> start(3);
    const auto enumerate = [&](auto&& self, int pos, int earliest) -> void {
      if (pos == 3) {
        std::vector<int> by_id(3);
        for (int q = 0; q < 3; ++q) by_id[perm.at(q) - 1] = start[q];
        BaselineSchedule candidate{by_id, perm};
        if (total_tardiness(inst, candidate) >= best) return;
        REQUIRE(!brute_force_is_robust(inst, candidate).robust);
        return;
      }
      const Operation& op = inst.op(perm.at(pos));
      for (int s = std::max(earliest, op.release); s <= inst.max_start(); ++s) {
        start[pos] = s;
        self(self, pos + 1, s + op.processing);
      }
    };
    enumerate(enumerate, 0, 0);
    ++verified;
  }
  CHECK(verified >= 6);
}

TEST_CASE("runtime grows at most linearly in the max deviation") {
  // Same operation data under two deviations; coarse factor-2 slack on the
  // linearity, with medians over repeated runs to tame timer noise.
  const auto time_solve = [](const Instance& inst) {
    Permutation perm = Permutation::identity(inst.n());
    optimal_robust_schedule(inst, perm);  // warm-up
    std::vector<double> samples;
    for (int rep = 0; rep < 5; ++rep) {
      auto begin = std::chrono::steady_clock::now();
      for (int i = 0; i < 40; ++i) optimal_robust_schedule(inst, perm);
      auto end = std::chrono::steady_clock::now();
      samples.push_back(std::chrono::duration<double>(end - begin).count());
    }
    std::sort(samples.begin(), samples.end());
    return samples[2];
  };
  Instance small = resched::testing::sweep_instance(20, 4, 77, 15, 3);
  Instance large = resched::testing::sweep_instance(20, 8, 77, 15, 3);
  const double t_small = time_solve(small);
  const double t_large = time_solve(large);
  CHECK(t_large <= 4.0 * t_small + 0.02);
}
