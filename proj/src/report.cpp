#include "ngas/report.hpp"

namespace ngas {

using nlohmann::json;

namespace {

template <class T>
void put(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <class T>
void get(const json& j, const char* key, std::optional<T>& v) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) v = it->get<T>();
}

}  // namespace

json to_json(const RunReport& r) {
  json metrics = json::object();
  put(metrics, "energy", r.metrics.energy);
  put(metrics, "distortion", r.metrics.distortion);
  put(metrics, "entropy", r.metrics.entropy);
  put(metrics, "max_entropy", r.metrics.max_entropy);
  put(metrics, "proximity", r.metrics.proximity);
  put(metrics, "hausdorff", r.metrics.hausdorff);
  put(metrics, "alpha", r.metrics.alpha);
  put(metrics, "alpha_intercept", r.metrics.alpha_intercept);
  put(metrics, "alpha_r2", r.metrics.alpha_r2);
  put(metrics, "phase", r.metrics.phase);

  json trace = json::array();
  for (const auto& t : r.trace) {
    json e = {{"step", t.step}, {"epsilon", t.epsilon}, {"lambda", t.lambda}};
    put(e, "proximity", t.proximity);
    put(e, "hausdorff", t.hausdorff);
    trace.push_back(std::move(e));
  }

  json j = {
      {"config", r.config},
      {"seeds",
       {{"dataset", r.dataset_seed}, {"training", r.training_seed}, {"evaluation", r.evaluation_seed}}},
      {"status", r.status},
      {"metrics", std::move(metrics)},
      {"trace", std::move(trace)},
      {"files", r.files},
      {"timings", r.timings},
  };
  if (!r.ok()) j["failure"] = {{"stage", r.failure_stage}, {"message", r.failure_message}};
  return j;
}

RunReport report_from_json(const json& j) {
  RunReport r;
  r.config = j.value("config", json());
  if (auto it = j.find("seeds"); it != j.end()) {
    r.dataset_seed = it->value("dataset", std::uint64_t{0});
    r.training_seed = it->value("training", std::uint64_t{0});
    r.evaluation_seed = it->value("evaluation", std::uint64_t{0});
  }
  r.status = j.value("status", std::string("ok"));
  if (auto it = j.find("failure"); it != j.end()) {
    r.failure_stage = it->value("stage", std::string());
    r.failure_message = it->value("message", std::string());
  }
  if (auto it = j.find("metrics"); it != j.end()) {
    const json& m = *it;
    get(m, "energy", r.metrics.energy);
    get(m, "distortion", r.metrics.distortion);
    get(m, "entropy", r.metrics.entropy);
    get(m, "max_entropy", r.metrics.max_entropy);
    get(m, "proximity", r.metrics.proximity);
    get(m, "hausdorff", r.metrics.hausdorff);
    get(m, "alpha", r.metrics.alpha);
    get(m, "alpha_intercept", r.metrics.alpha_intercept);
    get(m, "alpha_r2", r.metrics.alpha_r2);
    get(m, "phase", r.metrics.phase);
  }
  if (auto it = j.find("trace"); it != j.end()) {
    for (const auto& e : *it) {
      TracePoint t;
      t.step = e.at("step").get<std::uint64_t>();
      t.epsilon = e.at("epsilon").get<double>();
      t.lambda = e.at("lambda").get<double>();
      get(e, "proximity", t.proximity);
      get(e, "hausdorff", t.hausdorff);
      r.trace.push_back(t);
    }
  }
  if (auto it = j.find("files"); it != j.end())
    r.files = it->get<std::map<std::string, std::string>>();
  if (auto it = j.find("timings"); it != j.end())
    r.timings = it->get<std::map<std::string, double>>();
  return r;
}

}  // namespace ngas
