#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Core data model and schedule calculus for robust single-machine scheduling
// under per-interval energy consumption limits.
//
// Conventions used throughout the library:
//   - times are integers; interval k (0-based) covers [k*D, (k+1)*D],
//   - operation ids are 1-based and stored contiguously (id i at index i-1),
//   - permutation positions are 0-based,
//   - powers and energies are exact integers in milli-units (1/1000), so
//     limit comparisons never touch floating point.

namespace resched {

inline constexpr std::int64_t kMilli = 1000;

using EnergyMilli = std::int64_t;

struct Operation {
  int id = 0;  // 1-based
  int release = 0;
  int processing = 1;
  int due = 0;
  EnergyMilli power_milli = 0;  // energy consumed per time unit, milli-units
};

/// Bijection position -> operation id over ids 1..n.
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<int> order) : order_(std::move(order)) {
    std::vector<char> seen(order_.size(), 0);
    for (int id : order_) {
      if (id < 1 || id > static_cast<int>(order_.size()) || seen[id - 1]) {
        throw std::invalid_argument("permutation is not a bijection over 1..n");
      }
      seen[id - 1] = 1;
    }
  }

  static Permutation identity(int n) {
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int pos = 0; pos < n; ++pos) order[pos] = pos + 1;
    return Permutation(std::move(order));
  }

  int size() const { return static_cast<int>(order_.size()); }
  int at(int pos) const { return order_[pos]; }
  const std::vector<int>& order() const { return order_; }

  /// Position of an operation id, O(n).
  int position_of(int id) const {
    for (int pos = 0; pos < size(); ++pos) {
      if (order_[pos] == id) return pos;
    }
    throw std::out_of_range("id not in permutation");
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  auto operator<=>(const Permutation& other) const { return order_ <=> other.order_; }

 private:
  std::vector<int> order_;
};

/// Immutable problem data. The horizon is num_intervals * interval_length.
class Instance {
 public:
  Instance(std::vector<Operation> operations, int interval_length,
           std::vector<EnergyMilli> energy_limits_milli, int max_deviation)
      : operations_(std::move(operations)),
        interval_length_(interval_length),
        energy_limits_milli_(std::move(energy_limits_milli)),
        max_deviation_(max_deviation) {
    if (interval_length_ <= 0) throw std::invalid_argument("interval_length must be positive");
    if (max_deviation_ < 0) throw std::invalid_argument("max_deviation must be non-negative");
    if (operations_.empty()) throw std::invalid_argument("instance needs at least one operation");
    if (energy_limits_milli_.empty()) throw std::invalid_argument("instance needs at least one metering interval");
    int max_processing = 0;
    int max_release = 0;
    for (std::size_t i = 0; i < operations_.size(); ++i) {
      const Operation& op = operations_[i];
      if (op.id != static_cast<int>(i) + 1) throw std::invalid_argument("operation ids must be 1..n in order");
      if (op.processing < 1) throw std::invalid_argument("processing time must be >= 1");
      if (op.release < 0 || op.due < 0) throw std::invalid_argument("release and due must be non-negative");
      if (op.power_milli < 0) throw std::invalid_argument("power must be non-negative");
      max_processing = std::max(max_processing, op.processing);
      max_release = std::max(max_release, op.release);
    }
    for (EnergyMilli limit : energy_limits_milli_) {
      if (limit < 0) throw std::invalid_argument("energy limits must be non-negative");
    }
    max_start_ = horizon() - (n() * max_deviation_ + max_processing);
    // A start-time domain must exist for every operation; otherwise the
    // instance is trivially infeasible and every algorithm downstream
    // would just rediscover that.
    if (max_start_ < max_release) {
      throw std::invalid_argument("trivially infeasible: max start " + std::to_string(max_start_) +
                                  " below max release " + std::to_string(max_release));
    }
  }

  int n() const { return static_cast<int>(operations_.size()); }
  int interval_length() const { return interval_length_; }
  int num_intervals() const { return static_cast<int>(energy_limits_milli_.size()); }
  int horizon() const { return num_intervals() * interval_length_; }
  int max_deviation() const { return max_deviation_; }
  int max_start() const { return max_start_; }

  const Operation& op(int id) const { return operations_[id - 1]; }
  const std::vector<Operation>& operations() const { return operations_; }

  EnergyMilli energy_limit_milli(int interval) const { return energy_limits_milli_[interval]; }
  const std::vector<EnergyMilli>& energy_limits_milli() const { return energy_limits_milli_; }

  int interval_start(int interval) const { return interval * interval_length_; }
  int interval_end(int interval) const { return (interval + 1) * interval_length_; }
  /// 0-based interval containing time unit [t, t+1).
  int interval_of(int t) const { return t / interval_length_; }

  int min_release() const {
    int r = operations_[0].release;
    for (const Operation& op : operations_) r = std::min(r, op.release);
    return r;
  }

 private:
  std::vector<Operation> operations_;
  int interval_length_;
  std::vector<EnergyMilli> energy_limits_milli_;
  int max_deviation_;
  int max_start_;
};

/// Per-operation deviations, id-indexed, each in [0, max_deviation].
struct Scenario {
  std::vector<int> deviation;

  int of(int id) const { return deviation[id - 1]; }
};

/// Planned start times (id-indexed) plus the corresponding permutation.
struct BaselineSchedule {
  std::vector<int> start;  // start[id-1]
  Permutation perm;        // operations sorted by start

  int start_of(int id) const { return start[id - 1]; }
};

/// Realised start times for a position prefix of a permutation. Right-shift
/// schedules define starts only for positions 0..size()-1, so the prefix
/// length is first-class here rather than a padded vector.
struct RealisedSchedule {
  std::vector<int> start_by_pos;
  Permutation perm;

  int size() const { return static_cast<int>(start_by_pos.size()); }
  int start_at_pos(int pos) const { return start_by_pos[pos]; }
  int id_at_pos(int pos) const { return perm.at(pos); }

  /// Start of an operation id; the id must be inside the defined prefix.
  int start_of(int id) const { return start_by_pos[perm.position_of(id)]; }
};

/// Length of intersection of two intervals, max(0, min(b1,b2) - max(a1,a2)).
inline int interval_intersection_length(int a1, int b1, int a2, int b2) {
  return std::max(0, std::min(b1, b2) - std::max(a1, a2));
}

/// Intersection length between metering interval `interval` (0-based) and
/// operation `id` starting at time t.
inline int operation_interval_intersection(const Instance& inst, int interval, int id, int t) {
  return interval_intersection_length(inst.interval_start(interval), inst.interval_end(interval),
                                      t, t + inst.op(id).processing);
}

/// Realised schedule of a baseline under a scenario: the first operation
/// starts at its baseline start plus its deviation, every later one at the
/// max of its baseline start and its predecessor's realised completion,
/// plus its own deviation.
inline RealisedSchedule realised_schedule(const Instance& inst, const BaselineSchedule& base,
                                          const Scenario& scen) {
  const int n = base.perm.size();
  std::vector<int> realised(static_cast<std::size_t>(n));
  for (int pos = 0; pos < n; ++pos) {
    const int id = base.perm.at(pos);
    if (pos == 0) {
      realised[pos] = base.start_of(id) + scen.of(id);
    } else {
      const int prev_id = base.perm.at(pos - 1);
      realised[pos] =
          std::max(base.start_of(id), realised[pos - 1] + inst.op(prev_id).processing) + scen.of(id);
    }
  }
  return RealisedSchedule{std::move(realised), base.perm};
}

/// Latest start time schedule: the realised schedule under the all-max
/// deviation scenario; componentwise maximum over all realised schedules.
inline RealisedSchedule latest_start_schedule(const Instance& inst, const BaselineSchedule& base) {
  Scenario all_max{std::vector<int>(static_cast<std::size_t>(inst.n()), inst.max_deviation())};
  return realised_schedule(inst, base, all_max);
}

/// Right-shift schedule: pin the operation at position `pos` to realised
/// start t and push every earlier operation right as far as its latest start
/// time and the no-overlap constraint allow. Defined for positions 0..pos.
inline RealisedSchedule right_shift_schedule(const Instance& inst, const BaselineSchedule& base,
                                             int pos, int t) {
  const RealisedSchedule lst = latest_start_schedule(inst, base);
  const int id = base.perm.at(pos);
  if (t < base.start_of(id) || t > lst.start_at_pos(pos)) {
    throw std::invalid_argument("right-shift start outside [baseline start, latest start]");
  }
  std::vector<int> shifted(static_cast<std::size_t>(pos) + 1);
  shifted[pos] = t;
  for (int q = pos - 1; q >= 0; --q) {
    shifted[q] = std::min(lst.start_at_pos(q), shifted[q + 1] - inst.op(base.perm.at(q)).processing);
  }
  return RealisedSchedule{std::move(shifted), base.perm};
}

/// Total energy consumed in a metering interval by all operations of a
/// baseline schedule, in milli-units.
inline EnergyMilli interval_energy(const Instance& inst, const BaselineSchedule& base, int interval) {
  EnergyMilli total = 0;
  for (const Operation& op : inst.operations()) {
    total += static_cast<EnergyMilli>(operation_interval_intersection(inst, interval, op.id,
                                                                      base.start_of(op.id))) *
             op.power_milli;
  }
  return total;
}

/// Total energy consumed in a metering interval by the defined prefix of a
/// realised schedule, in milli-units.
inline EnergyMilli interval_energy(const Instance& inst, const RealisedSchedule& realised,
                                   int interval) {
  EnergyMilli total = 0;
  for (int pos = 0; pos < realised.size(); ++pos) {
    const int id = realised.id_at_pos(pos);
    total += static_cast<EnergyMilli>(operation_interval_intersection(
                 inst, interval, id, realised.start_at_pos(pos))) *
             inst.op(id).power_milli;
  }
  return total;
}

/// Sum over operations of max(0, completion - due) for a baseline schedule.
inline std::int64_t total_tardiness(const Instance& inst, const BaselineSchedule& base) {
  std::int64_t total = 0;
  for (const Operation& op : inst.operations()) {
    total += std::max<std::int64_t>(0, base.start_of(op.id) + op.processing - op.due);
  }
  return total;
}

/// Checks release times, the max-start bound and non-overlap. Returns a
/// description of the first problem found, or nullopt if valid.
inline std::optional<std::string> validate_baseline(const Instance& inst,
                                                    const std::vector<int>& start) {
  if (static_cast<int>(start.size()) != inst.n()) {
    return "schedule has " + std::to_string(start.size()) + " starts, instance has " +
           std::to_string(inst.n()) + " operations";
  }
  for (const Operation& op : inst.operations()) {
    const int s = start[op.id - 1];
    if (s < op.release) {
      return "operation " + std::to_string(op.id) + " starts before its release time";
    }
    if (s > inst.max_start()) {
      return "operation " + std::to_string(op.id) + " starts after the max start " +
             std::to_string(inst.max_start());
    }
  }
  std::vector<int> by_start(static_cast<std::size_t>(inst.n()));
  for (int i = 0; i < inst.n(); ++i) by_start[i] = i + 1;
  std::sort(by_start.begin(), by_start.end(),
            [&](int a, int b) { return std::pair(start[a - 1], a) < std::pair(start[b - 1], b); });
  for (int pos = 0; pos + 1 < inst.n(); ++pos) {
    const int id = by_start[pos];
    const int next = by_start[pos + 1];
    if (start[id - 1] + inst.op(id).processing > start[next - 1]) {
      return "operations " + std::to_string(id) + " and " + std::to_string(next) + " overlap";
    }
  }
  return std::nullopt;
}

/// Builds a BaselineSchedule from id-indexed starts, deriving the
/// permutation. Throws std::invalid_argument if the schedule is invalid.
inline BaselineSchedule make_baseline(const Instance& inst, std::vector<int> start) {
  if (auto problem = validate_baseline(inst, start)) {
    throw std::invalid_argument("invalid baseline schedule: " + *problem);
  }
  std::vector<int> order(static_cast<std::size_t>(inst.n()));
  for (int i = 0; i < inst.n(); ++i) order[i] = i + 1;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::pair(start[a - 1], a) < std::pair(start[b - 1], b); });
  return BaselineSchedule{std::move(start), Permutation(std::move(order))};
}

}  // namespace resched
