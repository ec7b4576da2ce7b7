#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "resched/core.hpp"
#include "resched/instance_gen.hpp"
#include "resched/solve_result.hpp"

// JSON serialization for instances, solver results, and benchmark
// manifests. Powers travel as integer milli-units; energy limits as plain
// numbers (integral where possible), parsed back to exact milli-units.

namespace resched::io {

using nlohmann::json;

inline json energy_to_json(EnergyMilli milli) {
  if (milli % kMilli == 0) return json(milli / kMilli);
  return json(static_cast<double>(milli) / static_cast<double>(kMilli));
}

inline EnergyMilli energy_from_json(const json& value) {
  if (value.is_number_integer()) return value.get<std::int64_t>() * kMilli;
  if (value.is_number_float()) return std::llround(value.get<double>() * kMilli);
  throw std::invalid_argument("energy limit must be a number");
}

inline json instance_to_json(const Instance& inst) {
  json ops = json::array();
  for (const Operation& op : inst.operations()) {
    ops.push_back({{"id", op.id},
                   {"release", op.release},
                   {"processing", op.processing},
                   {"due", op.due},
                   {"power_milli", op.power_milli}});
  }
  json limits = json::array();
  for (EnergyMilli limit : inst.energy_limits_milli()) limits.push_back(energy_to_json(limit));
  return json{{"n", inst.n()},
              {"interval_length", inst.interval_length()},
              {"num_intervals", inst.num_intervals()},
              {"energy_limits", std::move(limits)},
              {"max_deviation", inst.max_deviation()},
              {"operations", std::move(ops)}};
}

inline Instance instance_from_json(const json& data) {
  const int n = data.at("n").get<int>();
  const int interval_length = data.at("interval_length").get<int>();
  const int num_intervals = data.at("num_intervals").get<int>();
  const json& limits = data.at("energy_limits");
  if (static_cast<int>(limits.size()) != num_intervals) {
    throw std::invalid_argument("energy_limits length does not match num_intervals");
  }
  std::vector<EnergyMilli> limits_milli;
  limits_milli.reserve(limits.size());
  for (const json& limit : limits) limits_milli.push_back(energy_from_json(limit));

  const json& ops = data.at("operations");
  if (static_cast<int>(ops.size()) != n) {
    throw std::invalid_argument("operations length does not match n");
  }
  std::vector<Operation> operations;
  operations.reserve(ops.size());
  for (const json& op : ops) {
    operations.push_back(Operation{op.at("id").get<int>(), op.at("release").get<int>(),
                                   op.at("processing").get<int>(), op.at("due").get<int>(),
                                   op.at("power_milli").get<EnergyMilli>()});
  }
  return Instance(std::move(operations), interval_length, std::move(limits_milli),
                  data.at("max_deviation").get<int>());
}

inline std::string serialize(const json& data) { return data.dump(2) + "\n"; }

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json data;
  in >> data;
  return data;
}

inline void save_json_file(const std::string& path, const json& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << serialize(data);
}

inline Instance load_instance(const std::string& path) {
  return instance_from_json(load_json_file(path));
}

inline json result_to_json(const std::string& algorithm, const SolveResult& result) {
  json counters = json::object();
  for (const auto& [name, value] : result.counters) counters[name] = value;
  json data{{"algorithm", algorithm},
            {"status", to_string(result.status)},
            {"proven_optimal", result.proven_optimal},
            {"runtime_ms", result.runtime_ms},
            {"counters", std::move(counters)},
            {"generator_version", kGeneratorVersion}};
  if (result.schedule) {
    data["objective"] = result.objective;
    data["starts"] = result.schedule->start;
    data["robust"] = true;
  }
  return data;
}

/// Reads a start-time vector from a result file or any {"starts": [...]}.
inline std::vector<int> starts_from_json(const json& data) {
  return data.at("starts").get<std::vector<int>>();
}

struct ManifestEntry {
  std::string path;
  int n = 0;
  double alpha1 = 0;
  double alpha2 = 0;
  double alpha3 = 0;
  int max_deviation = 0;
  std::uint64_t seed = 0;
  int attempt = 0;
};

struct Manifest {
  std::vector<ManifestEntry> instances;
};

inline json manifest_to_json(const Manifest& manifest) {
  json entries = json::array();
  for (const ManifestEntry& entry : manifest.instances) {
    entries.push_back({{"path", entry.path},
                       {"n", entry.n},
                       {"alpha1", entry.alpha1},
                       {"alpha2", entry.alpha2},
                       {"alpha3", entry.alpha3},
                       {"max_deviation", entry.max_deviation},
                       {"seed", entry.seed},
                       {"attempt", entry.attempt}});
  }
  return json{{"generator_version", kGeneratorVersion}, {"instances", std::move(entries)}};
}

inline Manifest manifest_from_json(const json& data) {
  Manifest manifest;
  for (const json& entry : data.at("instances")) {
    manifest.instances.push_back(ManifestEntry{
        entry.at("path").get<std::string>(), entry.at("n").get<int>(),
        entry.at("alpha1").get<double>(), entry.at("alpha2").get<double>(),
        entry.at("alpha3").get<double>(), entry.at("max_deviation").get<int>(),
        entry.at("seed").get<std::uint64_t>(), entry.value("attempt", 0)});
  }
  return manifest;
}

inline ManifestEntry manifest_entry_for(const GeneratedInstance& generated,
                                        const std::string& path) {
  return ManifestEntry{path,
                       generated.config.n,
                       generated.config.alpha1,
                       generated.config.alpha2,
                       generated.config.alpha3,
                       generated.config.max_deviation,
                       generated.config.seed,
                       generated.attempt};
}

}  // namespace resched::io
