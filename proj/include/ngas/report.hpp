#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace ngas {

struct TracePoint {
  std::uint64_t step = 0;
  double epsilon = 0.0;
  double lambda = 0.0;
  std::optional<double> proximity;
  std::optional<double> hausdorff;

  friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

struct Metrics {
  std::optional<double> energy;
  std::optional<double> distortion;
  std::optional<double> entropy;
  std::optional<double> max_entropy;  // ln k
  std::optional<double> proximity;
  std::optional<double> hausdorff;
  std::optional<double> alpha;
  std::optional<double> alpha_intercept;
  std::optional<double> alpha_r2;
  std::optional<std::string> phase;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// Full record of one run. `config` is the resolved experiment config, enough
/// to repeat the run in isolation. Everything except `timings` is a pure
/// function of that config.
struct RunReport {
  nlohmann::json config;
  std::uint64_t dataset_seed = 0;
  std::uint64_t training_seed = 0;
  std::uint64_t evaluation_seed = 0;
  std::string status = "ok";  // "ok" or "failed"
  std::string failure_stage;
  std::string failure_message;
  Metrics metrics;
  std::vector<TracePoint> trace;
  std::map<std::string, std::string> files;
  std::map<std::string, double> timings;  // seconds, per stage

  bool ok() const { return status == "ok"; }

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

nlohmann::json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

}  // namespace ngas
