#pragma once

// Experiment configuration and its JSON form.
//
//   {
//     "task":  {"kind": "threshold", "n": 1024, "k": 5}
//            | {"kind": "clusters", "p": 2, "balls": [{"center": [..], "radius": r,
//                                                      "label": 1, "count": 40}, ...]}
//            | {"kind": "clusters", "p": 2, "layout": {"balls": 13, "radius": r,
//                                      "separation": D, "dim": 2, "points_per_ball": 40}}
//            | {"kind": "csv", "path": "data.csv", "holdout_fraction": 0.2},
//     "model": {"kind": "kernel", "h": 0.1, "p": 1} | {"kind": "spline", "density": "uniform"},
//     "score": "function" | "data" | "random",
//     "budget": 70,
//     "seed": 1,
//     "stop_at_zero_error": false,     (optional)
//     "bootstrap": "none" | "endpoints" (optional, 1D only)
//   }

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "maximin/errors.hpp"
#include "maximin/kernel.hpp"
#include "maximin/synthetic.hpp"

namespace maximin::harness {

using nlohmann::json;

enum class TaskKind { Threshold, Clusters, Csv };
enum class ModelKind { Kernel, Spline };
enum class Strategy { FunctionNorm, DataNorm, Random };
enum class Bootstrap { None, Endpoints };

struct TaskConfig {
  TaskKind kind = TaskKind::Threshold;
  std::size_t n = 1024;
  std::size_t k = 5;
  synthetic::ClusterSpec clusters;
  std::string csv_path;
  double holdout_fraction = 0.0;
};

struct ModelConfig {
  ModelKind kind = ModelKind::Kernel;
  KernelConfig kernel;
  std::string density = "uniform";  // spline data-norm measure: "uniform" | "empirical"
};

struct ExperimentConfig {
  TaskConfig task;
  ModelConfig model;
  Strategy strategy = Strategy::FunctionNorm;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  bool stop_at_zero_error = false;
  Bootstrap bootstrap = Bootstrap::None;
};

inline std::string to_string(TaskKind k) {
  switch (k) {
    case TaskKind::Threshold: return "threshold";
    case TaskKind::Clusters: return "clusters";
    case TaskKind::Csv: return "csv";
  }
  return "?";
}

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::FunctionNorm: return "function";
    case Strategy::DataNorm: return "data";
    case Strategy::Random: return "random";
  }
  return "?";
}

inline Strategy parse_strategy(const std::string& s) {
  if (s == "function") return Strategy::FunctionNorm;
  if (s == "data") return Strategy::DataNorm;
  if (s == "random") return Strategy::Random;
  throw ConfigError("unknown score '" + s + "' (function | data | random)");
}

namespace detail {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError(std::string("missing required field '") + key + "'");
  return get_or<T>(j, key, T{});
}

}  // namespace detail

inline synthetic::ClusterSpec cluster_spec_from_json(const json& j) {
  synthetic::ClusterSpec spec;
  spec.p = detail::get_or<double>(j, "p", 2.0);
  if (j.contains("layout")) {
    const json& l = j.at("layout");
    std::vector<int> labels = detail::get_or<std::vector<int>>(l, "labels", {});
    spec = synthetic::grid_layout(detail::require<std::size_t>(l, "balls"),
                                  detail::require<double>(l, "radius"),
                                  detail::require<double>(l, "separation"),
                                  detail::get_or<std::size_t>(l, "dim", 2), spec.p,
                                  detail::require<std::size_t>(l, "points_per_ball"),
                                  std::move(labels));
  } else {
    if (!j.contains("balls") || !j.at("balls").is_array())
      throw ConfigError("cluster spec needs 'balls' or 'layout'");
    for (const json& b : j.at("balls")) {
      synthetic::Ball ball;
      const auto c = detail::require<std::vector<double>>(b, "center");
      ball.center = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
      ball.radius = detail::require<double>(b, "radius");
      ball.label = detail::get_or<int>(b, "label", 1);
      ball.count = detail::require<std::size_t>(b, "count");
      spec.balls.push_back(std::move(ball));
    }
  }
  spec.validate();
  return spec;
}

inline json cluster_spec_to_json(const synthetic::ClusterSpec& spec) {
  json balls = json::array();
  for (const auto& b : spec.balls)
    balls.push_back({{"center", std::vector<double>(b.center.data(), b.center.data() + b.center.size())},
                     {"radius", b.radius},
                     {"label", b.label},
                     {"count", b.count}});
  return {{"p", spec.p}, {"balls", balls}};
}

inline ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig cfg;

  const json& task = j.contains("task") ? j.at("task") : throw ConfigError("missing 'task'");
  const std::string kind = detail::require<std::string>(task, "kind");
  if (kind == "threshold") {
    cfg.task.kind = TaskKind::Threshold;
    cfg.task.n = detail::get_or<std::size_t>(task, "n", 1024);
    cfg.task.k = detail::get_or<std::size_t>(task, "k", 5);
  } else if (kind == "clusters") {
    cfg.task.kind = TaskKind::Clusters;
    cfg.task.clusters = cluster_spec_from_json(task);
  } else if (kind == "csv") {
    cfg.task.kind = TaskKind::Csv;
    cfg.task.csv_path = detail::require<std::string>(task, "path");
    cfg.task.holdout_fraction = detail::get_or<double>(task, "holdout_fraction", 0.0);
    if (!(cfg.task.holdout_fraction >= 0.0 && cfg.task.holdout_fraction < 1.0))
      throw ConfigError("holdout_fraction must be in [0, 1)");
  } else {
    throw ConfigError("unknown task kind '" + kind + "' (threshold | clusters | csv)");
  }

  const json model = j.contains("model") ? j.at("model") : json::object({{"kind", "kernel"}});
  const std::string model_kind = detail::get_or<std::string>(model, "kind", "kernel");
  if (model_kind == "kernel") {
    cfg.model.kind = ModelKind::Kernel;
    cfg.model.kernel.bandwidth = detail::get_or<double>(model, "h", 0.1);
    cfg.model.kernel.exponent = detail::get_or<double>(model, "p", 1.0);
    try {
      cfg.model.kernel.validate();
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    }
  } else if (model_kind == "spline") {
    cfg.model.kind = ModelKind::Spline;
    cfg.model.density = detail::get_or<std::string>(model, "density", "uniform");
    if (cfg.model.density != "uniform" && cfg.model.density != "empirical")
      throw ConfigError("spline density must be 'uniform' or 'empirical'");
  } else {
    throw ConfigError("unknown model kind '" + model_kind + "' (kernel | spline)");
  }

  cfg.strategy = parse_strategy(detail::get_or<std::string>(j, "score", "function"));
  cfg.budget = detail::require<std::size_t>(j, "budget");
  if (!j.contains("seed")) throw ConfigError("missing required field 'seed'");
  cfg.seed = detail::require<std::uint64_t>(j, "seed");
  cfg.stop_at_zero_error = detail::get_or<bool>(j, "stop_at_zero_error", false);
  const std::string boot = detail::get_or<std::string>(j, "bootstrap", "none");
  if (boot == "none")
    cfg.bootstrap = Bootstrap::None;
  else if (boot == "endpoints")
    cfg.bootstrap = Bootstrap::Endpoints;
  else
    throw ConfigError("bootstrap must be 'none' or 'endpoints'");
  return cfg;
}

inline json config_to_json(const ExperimentConfig& cfg) {
  json task;
  switch (cfg.task.kind) {
    case TaskKind::Threshold:
      task = {{"kind", "threshold"}, {"n", cfg.task.n}, {"k", cfg.task.k}};
      break;
    case TaskKind::Clusters:
      task = cluster_spec_to_json(cfg.task.clusters);
      task["kind"] = "clusters";
      break;
    case TaskKind::Csv:
      task = {{"kind", "csv"}, {"path", cfg.task.csv_path},
              {"holdout_fraction", cfg.task.holdout_fraction}};
      break;
  }
  json model;
  if (cfg.model.kind == ModelKind::Kernel)
    model = {{"kind", "kernel"}, {"h", cfg.model.kernel.bandwidth}, {"p", cfg.model.kernel.exponent}};
  else
    model = {{"kind", "spline"}, {"density", cfg.model.density}};
  return {{"task", task},
          {"model", model},
          {"score", to_string(cfg.strategy)},
          {"budget", cfg.budget},
          {"seed", cfg.seed},
          {"stop_at_zero_error", cfg.stop_at_zero_error},
          {"bootstrap", cfg.bootstrap == Bootstrap::None ? "none" : "endpoints"}};
}

}  // namespace maximin::harness
