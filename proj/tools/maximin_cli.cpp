// maximin: run, sweep, check and gen subcommands over the header library.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "maximin/maximin.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw maximin::ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw maximin::ConfigError(path + ": " + e.what());
  }
}

// "a..b", inclusive.
std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      const auto v = std::stoull(s);
      return {v, v};
    }
    const auto a = std::stoull(s.substr(0, dots));
    const auto b = std::stoull(s.substr(dots + 2));
    if (b < a) throw maximin::ArgumentError("empty seed range " + s);
    return {a, b};
  } catch (const std::logic_error&) {
    throw maximin::ArgumentError("seed range must look like 1..20, got '" + s + "'");
  }
}

void print_run(const maximin::harness::RunRecord& rec) {
  std::cout << "seed " << rec.seed << ": " << rec.steps.size() << " queries, final error "
            << rec.final_error() << ", queries to zero ";
  if (rec.queries_to_zero)
    std::cout << *rec.queries_to_zero;
  else
    std::cout << "never";
  std::cout << '\n';
}

int cmd_run(const std::string& config, const std::string& out) {
  const auto cfg = maximin::harness::config_from_json(load_json(config));
  const auto rec = maximin::harness::run_experiment(cfg);
  maximin::harness::write_outputs(out, rec);
  print_run(rec);
  return 0;
}

int cmd_sweep(const std::string& config, const std::string& seeds, const std::string& out) {
  auto cfg = maximin::harness::config_from_json(load_json(config));
  const auto [first, last] = parse_seed_range(seeds);
  std::vector<maximin::harness::RunRecord> runs;
  for (std::uint64_t s = first; s <= last; ++s) {
    cfg.seed = s;
    runs.push_back(maximin::harness::run_experiment(cfg));
    maximin::harness::write_outputs(fs::path(out) / ("seed_" + std::to_string(s)), runs.back());
    print_run(runs.back());
  }
  const auto summary = maximin::harness::summarize(runs);
  std::ofstream(fs::path(out) / "summary.json") << maximin::harness::summary_json(summary).dump(2)
                                                << '\n';
  std::cout << "median queries to zero: " << summary.median_queries_to_zero << '\n';
  return 0;
}

int cmd_check(const std::string& suite, std::uint64_t seed) {
  bool ok = true;
  for (const auto& r : maximin::checks::run_suite(maximin::checks::parse_suite(suite), seed)) {
    std::cout << maximin::checks::format(r) << '\n';
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

// Spec files:
//   threshold: {"n": 1024, "k": 5, "seed": 1}
//   clusters:  the "task" object of a run config (balls or layout) plus "seed".
int cmd_gen(const std::string& task, const std::string& spec_path, const std::string& out) {
  const json spec = load_json(spec_path);
  const auto seed = spec.value<std::uint64_t>("seed", 0);
  maximin::UnlabeledPool pool;
  if (task == "threshold") {
    auto data = maximin::synthetic::gen_threshold_task(spec.value<std::size_t>("n", 1024),
                                                       spec.value<std::size_t>("k", 5), seed);
    std::cout << "thresholds:";
    for (double t : data.task.thresholds) std::cout << ' ' << t;
    std::cout << '\n';
    pool = std::move(data.pool);
  } else if (task == "clusters") {
    pool = maximin::synthetic::gen_clusters(maximin::harness::cluster_spec_from_json(spec), seed).pool;
  } else {
    throw maximin::ArgumentError("unknown task '" + task + "' (threshold | clusters)");
  }
  if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
  std::ofstream file(out);
  if (!file) throw maximin::ArgumentError("cannot write " + out);
  maximin::dataset::write_csv(file, pool);
  std::cout << "wrote " << pool.size() << " rows to " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MaxiMin active learning with minimum-norm interpolators"};
  app.require_subcommand(1);

  std::string config, out, seeds, suite, task, spec;
  std::uint64_t seed = 1;

  auto* run = app.add_subcommand("run", "run one experiment");
  run->add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "output directory")->required();

  auto* sweep = app.add_subcommand("sweep", "run one experiment per seed and summarize");
  sweep->add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--seeds", seeds, "inclusive seed range, e.g. 1..20")->required();
  sweep->add_option("--out", out, "output directory")->required();

  auto* check = app.add_subcommand("check", "run an acceptance suite");
  check->add_option("--suite", suite, "bisection | clusters | splines | identities")
      ->required()
      ->check(CLI::IsMember({"bisection", "clusters", "splines", "identities"}));
  check->add_option("--seed", seed, "base seed");

  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset as CSV");
  gen->add_option("--task", task, "threshold | clusters")
      ->required()
      ->check(CLI::IsMember({"threshold", "clusters"}));
  gen->add_option("--spec", spec, "task spec (JSON)")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", out, "output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, out);
    if (*sweep) return cmd_sweep(config, seeds, out);
    if (*check) return cmd_check(suite, seed);
    if (*gen) return cmd_gen(task, spec, out);
  } catch (const maximin::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
