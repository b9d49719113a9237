#pragma once

// Synthetic tasks: 1D multi-threshold labelings of uniform points, and
// mixtures of uniformly filled l_p balls.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "maximin/errors.hpp"
#include "maximin/kernel.hpp"
#include "maximin/scoring.hpp"

namespace maximin::synthetic {

/// Piecewise-constant +-1 labeling of [0, 1] with alternating pieces.
struct ThresholdTask1D {
  std::size_t pieces = 1;
  std::vector<double> thresholds;  // sorted, strictly inside (0, 1)
  int first_label = 1;

  int label_at(double x) const {
    const auto crossed = std::upper_bound(thresholds.begin(), thresholds.end(), x) -
                         thresholds.begin();
    return crossed % 2 == 0 ? first_label : -first_label;
  }

  std::vector<double> piece_lengths() const {
    std::vector<double> out;
    double prev = 0.0;
    for (double t : thresholds) {
      out.push_back(t - prev);
      prev = t;
    }
    out.push_back(1.0 - prev);
    return out;
  }
};

struct ThresholdData {
  ThresholdTask1D task;
  UnlabeledPool pool;  // 1 x n, with oracle labels
};

/// n uniform points on [0, 1] labeled by a k-piece function. Cut i sits at
/// (i + U(-1/4, 1/4)) / k for i = 1..k-1, so every piece has length in
/// [0.5/k, 1.5/k].
inline ThresholdData gen_threshold_task(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw ArgumentError("threshold task needs k >= 1");
  if (k > n) throw ArgumentError("threshold task needs k <= n (k=" + std::to_string(k) +
                                 ", n=" + std::to_string(n) + ")");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ThresholdData out;
  out.task.pieces = k;
  out.task.first_label = unit(rng) < 0.5 ? 1 : -1;
  const double kd = static_cast<double>(k);
  for (std::size_t i = 1; i < k; ++i)
    out.task.thresholds.push_back((static_cast<double>(i) + jitter(rng)) / kd);

  out.pool.points.resize(1, static_cast<Eigen::Index>(n));
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = unit(rng);
    out.pool.points(0, static_cast<Eigen::Index>(i)) = x;
    labels[i] = out.task.label_at(x);
  }
  out.pool.oracle = std::move(labels);
  return out;
}

struct Ball {
  Eigen::VectorXd center;
  double radius = 0.0;
  int label = 1;
  std::size_t count = 0;
};

struct ClusterSpec {
  std::vector<Ball> balls;
  double p = 2.0;  // norm of the balls

  std::size_t dim() const { return balls.empty() ? 0 : static_cast<std::size_t>(balls[0].center.size()); }

  double max_radius() const {
    double r = 0.0;
    for (const auto& b : balls) r = std::max(r, b.radius);
    return r;
  }

  /// min_{i != j} ||c_i - c_j||_p - 2 max_i r_i; +inf for a single ball.
  double separation() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < balls.size(); ++i)
      for (std::size_t j = i + 1; j < balls.size(); ++j)
        best = std::min(best, minkowski_distance(balls[i].center, balls[j].center, p));
    return best - 2.0 * max_radius();
  }

  void validate() const {
    if (balls.empty()) throw ConfigError("cluster spec needs at least one ball");
    if (!(p >= 1.0)) throw ConfigError("ball norm exponent must be >= 1");
    const std::size_t d = dim();
    if (d == 0) throw ConfigError("ball centers need dimension >= 1");
    for (std::size_t i = 0; i < balls.size(); ++i) {
      const auto& b = balls[i];
      if (static_cast<std::size_t>(b.center.size()) != d)
        throw ConfigError("ball " + std::to_string(i) + " has a center of the wrong dimension");
      if (!(b.radius > 0.0)) throw ConfigError("ball " + std::to_string(i) + " needs radius > 0");
      if (b.label != 1 && b.label != -1)
        throw ConfigError("ball " + std::to_string(i) + " label must be +1 or -1");
    }
    // Pairwise disjointness uses the actual radii; D > 0 is the stronger test.
    for (std::size_t i = 0; i < balls.size(); ++i)
      for (std::size_t j = i + 1; j < balls.size(); ++j)
        if (minkowski_distance(balls[i].center, balls[j].center, p) <=
            balls[i].radius + balls[j].radius)
          throw ConfigError("balls " + std::to_string(i) + " and " + std::to_string(j) +
                            " overlap");
    if (!(separation() > 0.0)) throw ConfigError("cluster separation D must be positive");
  }
};

struct ClusterData {
  UnlabeledPool pool;
  std::vector<std::size_t> membership;  // ball index per pool point
};

/// Uniform sample from the l_p ball by rejection from its bounding box.
inline Eigen::VectorXd sample_in_ball(const Ball& b, double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  const Eigen::Index d = b.center.size();
  Eigen::VectorXd z(d);
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(d);
  for (;;) {
    for (Eigen::Index i = 0; i < d; ++i) z[i] = box(rng);
    if (minkowski_distance(z, origin, p) <= 1.0) return b.center + b.radius * z;
  }
}

inline ClusterData gen_clusters(const ClusterSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  std::size_t total = 0;
  for (const auto& b : spec.balls) total += b.count;
  ClusterData out;
  out.pool.points.resize(static_cast<Eigen::Index>(spec.dim()), static_cast<Eigen::Index>(total));
  std::vector<int> labels;
  labels.reserve(total);
  Eigen::Index col = 0;
  for (std::size_t i = 0; i < spec.balls.size(); ++i) {
    for (std::size_t c = 0; c < spec.balls[i].count; ++c) {
      out.pool.points.col(col++) = sample_in_ball(spec.balls[i], spec.p, rng);
      labels.push_back(spec.balls[i].label);
      out.membership.push_back(i);
    }
  }
  out.pool.oracle = std::move(labels);
  return out;
}

/// Equal-radius balls on a square grid in the first two coordinates, spaced so
/// that the separation is exactly `separation`. Labels alternate by default.
inline ClusterSpec grid_layout(std::size_t count_balls, double radius, double separation,
                               std::size_t dim, double p, std::size_t points_per_ball,
                               std::vector<int> labels = {}) {
  if (dim < 1) throw ConfigError("grid layout needs dim >= 1");
  if (labels.empty())
    for (std::size_t i = 0; i < count_balls; ++i) labels.push_back(i % 2 == 0 ? 1 : -1);
  if (labels.size() != count_balls) throw ConfigError("one label per ball required");
  const double spacing = separation + 2.0 * radius;
  const std::size_t side =
      dim == 1 ? count_balls
               : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count_balls))));
  ClusterSpec spec;
  spec.p = p;
  for (std::size_t i = 0; i < count_balls; ++i) {
    Ball b;
    b.center = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    b.center[0] = spacing * static_cast<double>(i % side);
    if (dim > 1) b.center[1] = spacing * static_cast<double>(i / side);
    b.radius = radius;
    b.label = labels[i];
    b.count = points_per_ball;
    spec.balls.push_back(std::move(b));
  }
  return spec;
}

enum class Regime { FirstPoint, ClusterExplore };

struct RegimeCondition {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;

  double margin() const { return lhs - rhs; }
};

struct RegimeReport {
  bool holds = false;
  std::vector<RegimeCondition> conditions;
};

/// Checks the geometric hypotheses under which the data-norm score provably
/// picks the largest ball first (FirstPoint) or keeps visiting unlabeled balls
/// (ClusterExplore).
inline RegimeReport validate_regime(const ClusterSpec& spec, const KernelConfig& cfg,
                                    Regime which) {
  cfg.validate();
  RegimeReport report;
  const double h = cfg.bandwidth;
  const double M = static_cast<double>(spec.balls.size());
  const double D = spec.separation();
  auto add = [&](std::string name, double lhs, double rhs, bool holds) {
    report.conditions.push_back({std::move(name), lhs, rhs, holds});
  };

  if (which == Regime::FirstPoint) {
    std::vector<double> radii;
    for (const auto& b : spec.balls) radii.push_back(b.radius);
    std::sort(radii.rbegin(), radii.rend());
    const double r1 = radii.empty() ? 0.0 : radii[0];
    const double r2 = radii.size() > 1 ? radii[1] : 0.0;
    const double d = static_cast<double>(spec.dim());
    // ln(1 - 1) diverges when the two largest balls tie.
    const double ratio = 1.0 - std::pow(r2 / r1, d);
    const double bound = ratio > 0.0 ? 0.5 * h * (std::log(M) - std::log(ratio))
                                     : std::numeric_limits<double>::infinity();
    add("r1 <= h/2", h / 2.0, r1, r1 <= h / 2.0);
    add("D > (h/2)[ln M - ln(1 - (r2/r1)^d)]", D, bound, std::isfinite(bound) && D > bound);
  } else {
    const double r = spec.max_radius();
    const double bound = 12.0 * h * std::log(2.0 * M);
    add("r < h/3", h / 3.0, r, r < h / 3.0);
    add("D >= 12 h ln(2M)", D, bound, D >= bound);
  }
  report.holds = std::all_of(report.conditions.begin(), report.conditions.end(),
                             [](const RegimeCondition& c) { return c.holds; });
  return report;
}

}  // namespace maximin::synthetic
