#pragma once

// Pool-based active learning loop: score the pool, select, reveal the oracle
// label, refit, measure. Baselines, summaries and result files live here too.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "maximin/config.hpp"
#include "maximin/dataset.hpp"
#include "maximin/errors.hpp"
#include "maximin/kernel.hpp"
#include "maximin/scoring.hpp"
#include "maximin/spline.hpp"
#include "maximin/synthetic.hpp"

namespace maximin::harness {

/// splitmix64 finalizer; derives independent streams from one user seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace streams {
inline constexpr std::uint64_t kTask = 1;
inline constexpr std::uint64_t kHoldout = 2;
inline constexpr std::uint64_t kSelection = 1000;  // + step
}  // namespace streams

/// Materialized task: the training pool with oracle labels, plus optional
/// held-out points and ball membership for cluster tasks.
struct Task {
  UnlabeledPool train;
  std::optional<UnlabeledPool> test;
  std::vector<std::size_t> membership;
  std::size_t cluster_count = 0;
  std::optional<synthetic::ThresholdTask1D> thresholds;
};

inline Task make_task(const ExperimentConfig& cfg) {
  Task task;
  const std::uint64_t seed = mix_seed(cfg.seed, streams::kTask);
  switch (cfg.task.kind) {
    case TaskKind::Threshold: {
      auto data = synthetic::gen_threshold_task(cfg.task.n, cfg.task.k, seed);
      task.train = std::move(data.pool);
      task.thresholds = std::move(data.task);
      break;
    }
    case TaskKind::Clusters: {
      auto data = synthetic::gen_clusters(cfg.task.clusters, seed);
      task.train = std::move(data.pool);
      task.membership = std::move(data.membership);
      task.cluster_count = cfg.task.clusters.balls.size();
      break;
    }
    case TaskKind::Csv: {
      UnlabeledPool all = dataset::read_csv(cfg.task.csv_path);
      const std::size_t n = all.size();
      const auto n_test = static_cast<std::size_t>(std::floor(cfg.task.holdout_fraction * n));
      if (n_test == 0) {
        task.train = std::move(all);
        break;
      }
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::mt19937_64 rng(mix_seed(cfg.seed, streams::kHoldout));
      std::shuffle(order.begin(), order.end(), rng);
      auto take = [&](std::size_t begin, std::size_t end) {
        UnlabeledPool p;
        p.points.resize(all.points.rows(), static_cast<Eigen::Index>(end - begin));
        std::vector<int> y;
        for (std::size_t i = begin; i < end; ++i) {
          p.points.col(static_cast<Eigen::Index>(i - begin)) = all.point(order[i]);
          y.push_back((*all.oracle)[order[i]]);
        }
        p.oracle = std::move(y);
        return p;
      };
      task.test = take(0, n_test);
      task.train = take(n_test, n);
      break;
    }
  }
  return task;
}

struct StepRecord {
  std::size_t step = 0;   // 1-based count of labels after this step
  std::size_t index = 0;  // pool index of the selected point
  Eigen::VectorXd point;
  int estimated_label = 1;
  int true_label = 1;
  double score = std::numeric_limits<double>::quiet_NaN();  // NaN for random / bootstrap picks
  double train_error = 0.0;
  std::optional<double> test_error;
  std::optional<std::size_t> cluster;
  bool explore_hypothesis = true;  // <= 1 labeled point per ball so far
  bool bootstrap = false;
};

struct RunRecord {
  std::string task_family;
  std::string strategy;
  std::uint64_t seed = 0;
  std::size_t pool_size = 0;
  double initial_error = 0.0;
  std::vector<StepRecord> steps;
  std::optional<std::size_t> queries_to_zero;
  std::vector<std::size_t> cluster_counts;

  double final_error() const { return steps.empty() ? initial_error : steps.back().train_error; }
  std::vector<std::size_t> selected() const {
    std::vector<std::size_t> out;
    for (const auto& s : steps) out.push_back(s.index);
    return out;
  }
};

namespace detail {

inline double sign_error(const Eigen::VectorXd& f, const std::vector<int>& y) {
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (sign_label(f[static_cast<Eigen::Index>(i)]) != y[i]) ++wrong;
  return y.empty() ? 0.0 : static_cast<double>(wrong) / static_cast<double>(y.size());
}

inline std::vector<Eigen::Index> as_index(const std::vector<std::size_t>& v) {
  return {v.begin(), v.end()};
}

/// Model-specific state of the loop.
class Learner {
 public:
  virtual ~Learner() = default;
  /// Scores for every remaining pool point, in `remaining` order.
  virtual std::vector<ScoredCandidate> score(const std::vector<std::size_t>& remaining,
                                             ScoreKind kind) = 0;
  virtual void add(std::size_t index, int label) = 0;
  /// Interpolant at every training point, and at every test point.
  virtual Eigen::VectorXd predict_train() const = 0;
  virtual Eigen::VectorXd predict_test() const = 0;
};

class KernelLearner final : public Learner {
 public:
  KernelLearner(const KernelConfig& cfg, const UnlabeledPool& train, const UnlabeledPool* test,
                bool need_gram)
      : model_(cfg), train_(train), test_(test) {
    rows_.resize(0, train.points.cols());
    if (test) test_rows_.resize(0, test->points.cols());
    if (need_gram) gram_ = gram_matrix(train.points, cfg);
  }

  std::vector<ScoredCandidate> score(const std::vector<std::size_t>& remaining,
                                     ScoreKind kind) override {
    const auto cols = as_index(remaining);
    PoolKernels pk;
    pk.cross = rows_.topRows(count_)(Eigen::all, cols);
    if (kind == ScoreKind::DataNorm) pk.gram = gram_(cols, cols);
    return score_pool(model_, pk, kind);
  }

  void add(std::size_t index, int label) override {
    const auto i = static_cast<Eigen::Index>(index);
    const Eigen::VectorXd a = rows_.topRows(count_).col(i);
    model_ = augmented_fit(model_, train_.point(index), label, a);
    Eigen::RowVectorXd row(train_.points.cols());
    if (gram_.size() > 0)
      row = gram_.row(i);
    else
      for (Eigen::Index j = 0; j < row.size(); ++j)
        row[j] = kernel_eval(train_.points.col(i), train_.points.col(j), model_.config());
    append_row(rows_, row);
    if (test_) {
      Eigen::RowVectorXd trow(test_->points.cols());
      for (Eigen::Index j = 0; j < trow.size(); ++j)
        trow[j] = kernel_eval(train_.points.col(i), test_->points.col(j), model_.config());
      append_row(test_rows_, trow);
    }
    ++count_;
  }

  Eigen::VectorXd predict_train() const override {
    if (model_.empty()) return Eigen::VectorXd::Zero(train_.points.cols());
    return rows_.topRows(count_).transpose() * model_.coefficients();
  }
  Eigen::VectorXd predict_test() const override {
    if (!test_) return {};
    if (model_.empty()) return Eigen::VectorXd::Zero(test_->points.cols());
    return test_rows_.topRows(count_).transpose() * model_.coefficients();
  }

 private:
  // Rows beyond count_ are spare capacity, doubled when exhausted.
  void append_row(Eigen::MatrixXd& m, const Eigen::RowVectorXd& row) const {
    if (count_ == m.rows()) m.conservativeResize(std::max<Eigen::Index>(8, 2 * m.rows()), Eigen::NoChange);
    m.row(count_) = row;
  }

  KernelInterpolator model_;
  const UnlabeledPool& train_;
  const UnlabeledPool* test_;
  Eigen::MatrixXd rows_;       // L x N kernel rows of labeled points vs the pool
  Eigen::MatrixXd test_rows_;  // L x T
  Eigen::MatrixXd gram_;
  Eigen::Index count_ = 0;
};

class SplineLearner final : public Learner {
 public:
  SplineLearner(const UnlabeledPool& train, const UnlabeledPool* test, bool empirical)
      : train_(train), test_(test), empirical_(empirical) {
    if (train.dim() != 1) throw ConfigError("the spline model needs a 1D task");
    lo_ = train.points.row(0).minCoeff();
    hi_ = train.points.row(0).maxCoeff();
  }

  std::vector<ScoredCandidate> score(const std::vector<std::size_t>& remaining,
                                     ScoreKind kind) override {
    std::vector<double> xs;
    xs.reserve(remaining.size());
    for (std::size_t i : remaining) xs.push_back(train_.points(0, static_cast<Eigen::Index>(i)));
    if (!model_) {
      // f == 0 with no knots: every candidate ties.
      std::vector<ScoredCandidate> out(xs.size());
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = {i, 1, 0.0};
      return out;
    }
    const spline::Density1D density =
        empirical_ ? spline::Density1D::empirical(xs)
                   : spline::Density1D::uniform(lo_, hi_ > lo_ ? hi_ : lo_ + 1.0);
    return spline::spline_score_pool(*model_, xs, kind, density);
  }

  void add(std::size_t index, int label) override {
    xs_.push_back(train_.points(0, static_cast<Eigen::Index>(index)));
    ys_.push_back(label);
    model_ = spline::fit_spline(xs_, ys_);
  }

  Eigen::VectorXd predict_train() const override { return predict(train_); }
  Eigen::VectorXd predict_test() const override { return test_ ? predict(*test_) : Eigen::VectorXd{}; }

 private:
  Eigen::VectorXd predict(const UnlabeledPool& pool) const {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(pool.points.cols());
    if (model_)
      for (Eigen::Index j = 0; j < f.size(); ++j) f[j] = model_->evaluate(pool.points(0, j));
    return f;
  }

  const UnlabeledPool& train_;
  const UnlabeledPool* test_;
  bool empirical_;
  double lo_ = 0.0, hi_ = 1.0;
  std::vector<double> xs_;
  std::vector<int> ys_;
  std::optional<spline::SplineInterpolator> model_;
};

}  // namespace detail

inline void validate(const ExperimentConfig& cfg, const Task& task) {
  if (task.train.empty()) throw ConfigError("task has an empty pool");
  if (cfg.budget > task.train.size())
    throw ConfigError("budget " + std::to_string(cfg.budget) + " exceeds pool size " +
                      std::to_string(task.train.size()));
  if (cfg.bootstrap == Bootstrap::Endpoints && task.train.dim() != 1)
    throw ConfigError("endpoint bootstrap needs a 1D task");
  if (cfg.model.kind == ModelKind::Spline && task.train.dim() != 1)
    throw ConfigError("the spline model needs a 1D task");
}

/// Runs the loop on a materialized task. When `forced` is given, the step-i
/// selection is forced[i] and the scores of that candidate are recorded.
inline RunRecord run_on_task(const ExperimentConfig& cfg, const Task& task,
                             const std::vector<std::size_t>* forced = nullptr) {
  validate(cfg, task);
  const UnlabeledPool& pool = task.train;
  const std::vector<int>& truth = *pool.oracle;
  const UnlabeledPool* test = task.test ? &*task.test : nullptr;

  std::unique_ptr<detail::Learner> learner;
  if (cfg.model.kind == ModelKind::Kernel)
    learner = std::make_unique<detail::KernelLearner>(cfg.model.kernel, pool, test,
                                                      cfg.strategy == Strategy::DataNorm);
  else
    learner = std::make_unique<detail::SplineLearner>(pool, test, cfg.model.density == "empirical");

  RunRecord rec;
  rec.task_family = to_string(cfg.task.kind);
  rec.strategy = to_string(cfg.strategy);
  rec.seed = cfg.seed;
  rec.pool_size = pool.size();
  rec.cluster_counts.assign(task.cluster_count, 0);

  Eigen::VectorXd f = learner->predict_train();
  rec.initial_error = detail::sign_error(f, truth);
  if (rec.initial_error == 0.0) rec.queries_to_zero = 0;

  std::vector<std::size_t> remaining(pool.size());
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});

  std::vector<std::size_t> boot;
  if (cfg.bootstrap == Bootstrap::Endpoints) {
    const auto& row = pool.points.row(0);
    Eigen::Index lo = 0, hi = 0;
    row.minCoeff(&lo);
    row.maxCoeff(&hi);
    boot.push_back(static_cast<std::size_t>(lo));
    if (hi != lo) boot.push_back(static_cast<std::size_t>(hi));
  }

  const std::size_t steps = forced ? std::min(forced->size(), pool.size()) : cfg.budget;
  for (std::size_t step = 0; step < steps && !remaining.empty(); ++step) {
    StepRecord sr;
    sr.step = step + 1;
    std::size_t pos = 0;
    const bool is_boot = step < boot.size();
    const bool scored = !is_boot && cfg.strategy != Strategy::Random;
    std::vector<ScoredCandidate> scores;
    if (scored)
      scores = learner->score(remaining, cfg.strategy == Strategy::FunctionNorm
                                             ? ScoreKind::FunctionNorm
                                             : ScoreKind::DataNorm);

    auto position_of = [&](std::size_t index) {
      const auto it = std::lower_bound(remaining.begin(), remaining.end(), index);
      if (it == remaining.end() || *it != index)
        throw ArgumentError("forced selection " + std::to_string(index) + " is not in the pool");
      return static_cast<std::size_t>(it - remaining.begin());
    };
    const std::uint64_t step_seed = mix_seed(cfg.seed, streams::kSelection + step);
    if (forced) {
      pos = position_of((*forced)[step]);
    } else if (is_boot) {
      pos = position_of(boot[step]);
    } else if (scored) {
      pos = select_from(scores, step_seed).index;
    } else {
      std::mt19937_64 rng(step_seed);
      pos = std::uniform_int_distribution<std::size_t>(0, remaining.size() - 1)(rng);
    }

    const std::size_t index = remaining[pos];
    sr.index = index;
    sr.point = pool.point(index);
    sr.bootstrap = is_boot;
    sr.estimated_label = sign_label(f[static_cast<Eigen::Index>(index)]);
    if (scored) {
      sr.score = scores[pos].score;
      sr.estimated_label = scores[pos].label;
    }
    sr.true_label = truth[index];

    learner->add(index, sr.true_label);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pos));

    f = learner->predict_train();
    sr.train_error = detail::sign_error(f, truth);
    if (test) sr.test_error = detail::sign_error(learner->predict_test(), *test->oracle);
    if (!task.membership.empty()) {
      sr.cluster = task.membership[index];
      ++rec.cluster_counts[*sr.cluster];
      sr.explore_hypothesis = std::all_of(rec.cluster_counts.begin(), rec.cluster_counts.end(),
                                          [](std::size_t c) { return c <= 1; });
    }
    rec.steps.push_back(std::move(sr));
    if (!rec.queries_to_zero && rec.steps.back().train_error == 0.0)
      rec.queries_to_zero = step + 1;
    if (cfg.stop_at_zero_error && rec.queries_to_zero && !forced) break;
  }
  return rec;
}

inline RunRecord run_experiment(const ExperimentConfig& cfg) {
  return run_on_task(cfg, make_task(cfg));
}

/// Re-runs the loop forcing the record's selections; with the same config the
/// result matches the record step for step.
inline RunRecord replay(const ExperimentConfig& cfg, const RunRecord& record) {
  const auto selected = record.selected();
  return run_on_task(cfg, make_task(cfg), &selected);
}

/// Sample quantile with linear interpolation between order statistics.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw ArgumentError("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0 || !std::isfinite(v[hi])) return v[lo];
  return v[lo] + frac * (v[hi] - v[lo]);
}

struct Summary {
  std::string task_family;
  std::size_t runs = 0;
  std::vector<double> median_error;  // index s: after s + 1 labels
  std::vector<double> q25_error;
  std::vector<double> q75_error;
  std::vector<std::optional<std::size_t>> queries_to_zero;
  std::size_t runs_reaching_zero = 0;
  /// Median over runs, counting runs that never reach zero as +inf.
  double median_queries_to_zero = std::numeric_limits<double>::infinity();
  std::optional<double> mean_cluster_count_std;
};

inline double population_std(const std::vector<std::size_t>& counts) {
  if (counts.empty()) return 0.0;
  const double n = static_cast<double>(counts.size());
  const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / n;
  double acc = 0.0;
  for (std::size_t c : counts) acc += (static_cast<double>(c) - mean) * (static_cast<double>(c) - mean);
  return std::sqrt(acc / n);
}

inline Summary summarize(const std::vector<RunRecord>& records) {
  if (records.empty()) throw ArgumentError("summarize needs at least one record");
  Summary s;
  s.task_family = records.front().task_family;
  s.runs = records.size();
  std::size_t longest = 0;
  for (const auto& r : records) {
    if (r.task_family != s.task_family)
      throw ArgumentError("cannot summarize mixed task families (" + s.task_family + ", " +
                          r.task_family + ")");
    longest = std::max(longest, r.steps.size());
  }
  for (std::size_t step = 0; step < longest; ++step) {
    std::vector<double> errs;
    // Runs that stopped early keep their final error.
    for (const auto& r : records)
      errs.push_back(step < r.steps.size() ? r.steps[step].train_error : r.final_error());
    s.median_error.push_back(quantile(errs, 0.5));
    s.q25_error.push_back(quantile(errs, 0.25));
    s.q75_error.push_back(quantile(errs, 0.75));
  }
  std::vector<double> qtz;
  for (const auto& r : records) {
    s.queries_to_zero.push_back(r.queries_to_zero);
    if (r.queries_to_zero) ++s.runs_reaching_zero;
    qtz.push_back(r.queries_to_zero ? static_cast<double>(*r.queries_to_zero)
                                    : std::numeric_limits<double>::infinity());
  }
  s.median_queries_to_zero = quantile(qtz, 0.5);
  if (!records.front().cluster_counts.empty()) {
    double acc = 0.0;
    for (const auto& r : records) acc += population_std(r.cluster_counts);
    s.mean_cluster_count_std = acc / static_cast<double>(records.size());
  }
  return s;
}

namespace detail {
inline std::string fmt_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

/// trace.csv: step,index,t_u,true_label,score,train_error[,test_error]
inline void write_trace(std::ostream& out, const RunRecord& rec) {
  const bool with_test = !rec.steps.empty() && rec.steps.front().test_error.has_value();
  out << "step,index,t_u,true_label,score,train_error" << (with_test ? ",test_error" : "") << '\n';
  for (const auto& s : rec.steps) {
    out << s.step << ',' << s.index << ',' << s.estimated_label << ',' << s.true_label << ','
        << detail::fmt_real(s.score) << ',' << detail::fmt_real(s.train_error);
    if (with_test) out << ',' << detail::fmt_real(*s.test_error);
    out << '\n';
  }
}

inline json record_summary_json(const RunRecord& rec) {
  json j = {{"task", rec.task_family},
            {"score", rec.strategy},
            {"seed", rec.seed},
            {"pool_size", rec.pool_size},
            {"labels", rec.steps.size()},
            {"queries_to_zero", rec.queries_to_zero ? json(*rec.queries_to_zero) : json(nullptr)},
            {"final_error", rec.final_error()}};
  if (!rec.steps.empty() && rec.steps.back().test_error)
    j["final_test_error"] = *rec.steps.back().test_error;
  if (!rec.cluster_counts.empty()) {
    j["per_cluster_counts"] = rec.cluster_counts;
    bool explored = true;
    std::vector<bool> per_step;
    for (const auto& s : rec.steps) per_step.push_back(s.explore_hypothesis);
    for (bool b : per_step) explored = explored && b;
    j["explore_hypothesis_per_step"] = per_step;
    j["explore_hypothesis"] = explored;
  }
  return j;
}

inline json summary_json(const Summary& s) {
  json qtz = json::array();
  for (const auto& q : s.queries_to_zero) qtz.push_back(q ? json(*q) : json(nullptr));
  json j = {{"task", s.task_family},
            {"runs", s.runs},
            {"queries_to_zero", qtz},
            {"runs_reaching_zero", s.runs_reaching_zero},
            {"median_queries_to_zero", std::isfinite(s.median_queries_to_zero)
                                           ? json(s.median_queries_to_zero)
                                           : json(nullptr)},
            {"median_error", s.median_error},
            {"q25_error", s.q25_error},
            {"q75_error", s.q75_error}};
  if (s.mean_cluster_count_std) j["mean_cluster_count_std"] = *s.mean_cluster_count_std;
  return j;
}

/// Writes trace.csv and summary.json into `dir` (created if missing).
inline void write_outputs(const std::filesystem::path& dir, const RunRecord& rec) {
  std::filesystem::create_directories(dir);
  std::ofstream trace(dir / "trace.csv");
  write_trace(trace, rec);
  std::ofstream summary(dir / "summary.json");
  summary << record_summary_json(rec).dump(2) << '\n';
  if (!trace || !summary) throw Error("failed writing outputs to " + dir.string());
}

}  // namespace maximin::harness
