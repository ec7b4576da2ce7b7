#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "resched/core.hpp"

// Random instance generator.
//
// Distributions: processing ~ U{1..D}; release times accumulate exponential
// interarrivals with mean alpha1 * sum(p)/n (rounded half-up); the slack
// due - (release + processing) ~ U{0..ceil(alpha2 * sum(p))}; power ~
// continuous U(alpha3*E/p, E/p) quantized to milli-units. The metering grid
// is intervals_per_op * n intervals of interval_length each, all with the
// same limit.
//
// Determinism: mt19937_64 with one substream per field, derived from
// (seed, field tag, attempt). Draw routines avoid std distributions, whose
// output is implementation-defined, so equal configs give byte-identical
// instances on every platform, and adding a field never perturbs the draws
// of existing ones.

namespace resched {

inline constexpr const char* kGeneratorVersion = "resched-gen/1";

struct GenConfig {
  int n = 5;
  double alpha1 = 0.6;
  double alpha2 = 0.1;
  double alpha3 = 0.1;
  int max_deviation = 3;
  std::uint64_t seed = 0;
  int interval_length = 15;
  int intervals_per_op = 3;
  double energy_limit = 100.0;
};

namespace gen_detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Field tags are fixed forever; new fields get new tags.
enum class Field : std::uint64_t {
  kProcessing = 0x70726f63,    // "proc"
  kInterarrival = 0x61727276,  // "arrv"
  kSlack = 0x736c636b,         // "slck"
  kPower = 0x70777220,         // "pwr "
};

class Substream {
 public:
  Substream(std::uint64_t seed, Field field, int attempt)
      : engine_(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(field)) ^
                           splitmix64(0xa77e3b7ULL + static_cast<std::uint64_t>(attempt)))) {}

  std::uint64_t next() { return engine_(); }

  /// Unbiased integer in [lo, hi].
  int uniform_int(int lo, int hi) {
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    std::uint64_t x, r;
    do {
      x = next();
      r = x % range;
    } while (x - r > ~std::uint64_t{0} - (range - 1));
    return lo + static_cast<int>(r);
  }

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform_real01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Exponential with the given mean, by inverse CDF.
  double exponential(double mean) { return -mean * std::log1p(-uniform_real01()); }

 private:
  std::mt19937_64 engine_;
};

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

struct SampledParams {
  std::vector<int> processing;
  std::vector<int> release;
  std::vector<int> due;
  std::vector<EnergyMilli> power_milli;
};

inline SampledParams sample_params(const GenConfig& cfg, int attempt) {
  SampledParams params;
  params.processing.resize(static_cast<std::size_t>(cfg.n));
  params.release.resize(static_cast<std::size_t>(cfg.n));
  params.due.resize(static_cast<std::size_t>(cfg.n));
  params.power_milli.resize(static_cast<std::size_t>(cfg.n));

  Substream proc(cfg.seed, Field::kProcessing, attempt);
  std::int64_t sum_processing = 0;
  for (int i = 0; i < cfg.n; ++i) {
    params.processing[i] = proc.uniform_int(1, cfg.interval_length);
    sum_processing += params.processing[i];
  }

  // Interarrival times; release of the first operation is the first draw.
  Substream arrival(cfg.seed, Field::kInterarrival, attempt);
  const double mean = cfg.alpha1 * static_cast<double>(sum_processing) / cfg.n;
  int release = 0;
  for (int i = 0; i < cfg.n; ++i) {
    release += static_cast<int>(std::floor(arrival.exponential(mean) + 0.5));
    params.release[i] = release;
  }

  // Due-date slack bound ceil(alpha2 * sum p), in exact integer arithmetic
  // over parts-per-million to dodge float ceil edge cases.
  Substream slack(cfg.seed, Field::kSlack, attempt);
  const std::int64_t a2_ppm = std::llround(cfg.alpha2 * 1e6);
  const int max_slack = static_cast<int>(ceil_div(a2_ppm * sum_processing, 1000000));
  for (int i = 0; i < cfg.n; ++i) {
    params.due[i] = params.release[i] + params.processing[i] + slack.uniform_int(0, max_slack);
  }

  // Power in [alpha3*E/p, E/p], quantized to milli-units. The integer upper
  // bound guarantees p * P <= E exactly, so an operation alone can never
  // violate a limit. A degenerate interval without any representable value
  // collapses to the upper bound.
  Substream power(cfg.seed, Field::kPower, attempt);
  const EnergyMilli limit_milli = std::llround(cfg.energy_limit * kMilli);
  const std::int64_t a3_ppm = std::llround(cfg.alpha3 * 1e6);
  for (int i = 0; i < cfg.n; ++i) {
    const int p = params.processing[i];
    const EnergyMilli upper = limit_milli / p;
    const EnergyMilli lower = std::min(upper, ceil_div(a3_ppm * limit_milli, 1000000LL * p));
    const double value =
        static_cast<double>(lower) +
        power.uniform_real01() * static_cast<double>(upper - lower);
    EnergyMilli quantized = static_cast<EnergyMilli>(std::floor(value + 0.5));
    params.power_milli[i] = std::clamp(quantized, lower, upper);
  }
  return params;
}

inline Instance build_instance(const GenConfig& cfg, const SampledParams& params,
                               int max_deviation) {
  std::vector<Operation> ops(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) {
    ops[i] = Operation{i + 1, params.release[i], params.processing[i], params.due[i],
                       params.power_milli[i]};
  }
  const int num_intervals = cfg.intervals_per_op * cfg.n;
  const EnergyMilli limit_milli = std::llround(cfg.energy_limit * kMilli);
  return Instance(std::move(ops), cfg.interval_length,
                  std::vector<EnergyMilli>(static_cast<std::size_t>(num_intervals), limit_milli),
                  max_deviation);
}

inline void validate_config(const GenConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(cfg.alpha3 > 0.0 && cfg.alpha3 <= 1.0)) throw std::invalid_argument("alpha3 must be in (0, 1]");
  if (cfg.alpha1 < 0.0 || cfg.alpha2 < 0.0) throw std::invalid_argument("alpha1 and alpha2 must be non-negative");
  if (cfg.interval_length < 1) throw std::invalid_argument("interval_length must be >= 1");
  if (cfg.intervals_per_op < 1) throw std::invalid_argument("intervals_per_op must be >= 1");
  if (cfg.energy_limit < 0.0) throw std::invalid_argument("energy_limit must be non-negative");
  if (cfg.max_deviation < 0) throw std::invalid_argument("max_deviation must be non-negative");
}

}  // namespace gen_detail

struct GeneratedInstance {
  Instance instance;
  GenConfig config;
  int attempt = 0;  // substream index that produced a valid instance
};

/// Generates one instance. Parameter draws whose release times leave no
/// start-time domain are discarded and the next substream is tried, up to
/// 100 attempts.
inline GeneratedInstance generate_instance(const GenConfig& cfg) {
  gen_detail::validate_config(cfg);
  for (int attempt = 0; attempt < 100; ++attempt) {
    gen_detail::SampledParams params = gen_detail::sample_params(cfg, attempt);
    try {
      return GeneratedInstance{gen_detail::build_instance(cfg, params, cfg.max_deviation), cfg,
                               attempt};
    } catch (const std::invalid_argument&) {
      continue;
    }
  }
  throw std::runtime_error("instance generation failed after 100 attempts (releases exceed the horizon)");
}

/// One paper-grid cell: instances sharing sampled parameters and differing
/// only in the max deviation. Validity is enforced at the largest deviation
/// so every variant is constructible.
inline std::vector<GeneratedInstance> generate_deviation_set(GenConfig cfg,
                                                             const std::vector<int>& deviations) {
  gen_detail::validate_config(cfg);
  int dmax = 0;
  for (int d : deviations) dmax = std::max(dmax, d);
  for (int attempt = 0; attempt < 100; ++attempt) {
    gen_detail::SampledParams params = gen_detail::sample_params(cfg, attempt);
    try {
      (void)gen_detail::build_instance(cfg, params, dmax);
    } catch (const std::invalid_argument&) {
      continue;
    }
    std::vector<GeneratedInstance> result;
    for (int d : deviations) {
      GenConfig variant = cfg;
      variant.max_deviation = d;
      result.push_back(
          GeneratedInstance{gen_detail::build_instance(cfg, params, d), variant, attempt});
    }
    return result;
  }
  throw std::runtime_error("instance generation failed after 100 attempts (releases exceed the horizon)");
}

/// The benchmark preset grid: (alpha1, alpha2, alpha3) over
/// {0.6,0.9} x {0.1,0.3} x {0.1,0.3,0.5}, ten parameter draws per triple,
/// three max-deviation variants {0,3,5} sharing each draw; 360 instances.
inline std::vector<GeneratedInstance> generate_paper_grid(int n, std::uint64_t base_seed,
                                                          int interval_length = 15,
                                                          int intervals_per_op = 3,
                                                          double energy_limit = 100.0) {
  const double alpha1_values[] = {0.6, 0.9};
  const double alpha2_values[] = {0.1, 0.3};
  const double alpha3_values[] = {0.1, 0.3, 0.5};
  const std::vector<int> deviations{0, 3, 5};
  std::vector<GeneratedInstance> all;
  all.reserve(360);
  std::uint64_t cell = 0;
  for (double a1 : alpha1_values) {
    for (double a2 : alpha2_values) {
      for (double a3 : alpha3_values) {
        for (int rep = 0; rep < 10; ++rep, ++cell) {
          GenConfig cfg;
          cfg.n = n;
          cfg.alpha1 = a1;
          cfg.alpha2 = a2;
          cfg.alpha3 = a3;
          cfg.interval_length = interval_length;
          cfg.intervals_per_op = intervals_per_op;
          cfg.energy_limit = energy_limit;
          cfg.seed = gen_detail::splitmix64(base_seed + 0x9e3779b97f4a7c15ULL * cell);
          for (GeneratedInstance& gi : generate_deviation_set(cfg, deviations)) {
            all.push_back(std::move(gi));
          }
        }
      }
    }
  }
  return all;
}

}  // namespace resched
