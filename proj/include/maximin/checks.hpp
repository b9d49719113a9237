#pragma once

// Acceptance suites. Each suite returns one CheckResult per criterion; the
// CLI `check` command and the acceptance test binary both run these.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "maximin/harness.hpp"
#include "maximin/kernel.hpp"
#include "maximin/laplace_1d.hpp"
#include "maximin/scoring.hpp"
#include "maximin/spline.hpp"
#include "maximin/synthetic.hpp"

namespace maximin::checks {

struct CheckResult {
  std::string id;
  std::string name;
  bool passed = false;
  std::string detail;
};

enum class Suite { Bisection, Clusters, Splines, Identities };

inline Suite parse_suite(const std::string& s) {
  if (s == "bisection") return Suite::Bisection;
  if (s == "clusters") return Suite::Clusters;
  if (s == "splines") return Suite::Splines;
  if (s == "identities") return Suite::Identities;
  throw ArgumentError("unknown suite '" + s + "' (bisection | clusters | splines | identities)");
}

namespace detail {

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

inline harness::ExperimentConfig threshold_config(std::size_t n, std::size_t k,
                                                  harness::ModelKind model,
                                                  harness::Strategy strategy,
                                                  std::size_t budget, std::uint64_t seed) {
  harness::ExperimentConfig cfg;
  cfg.task.kind = harness::TaskKind::Threshold;
  cfg.task.n = n;
  cfg.task.k = k;
  cfg.model.kind = model;
  cfg.model.kernel = {0.1, 1.0};
  cfg.strategy = strategy;
  cfg.budget = budget;
  cfg.seed = seed;
  cfg.stop_at_zero_error = true;
  return cfg;
}

inline LabeledSet labeled_1d(const std::vector<double>& xs, const std::vector<int>& ys) {
  LabeledSet s;
  for (std::size_t i = 0; i < xs.size(); ++i) s.add(Eigen::VectorXd::Constant(1, xs[i]), ys[i]);
  return s;
}

}  // namespace detail

// --- 1. bisection label complexity ------------------------------------------

inline CheckResult check_bisection_complexity(std::uint64_t seed) {
  constexpr std::size_t kN = 1024, kK = 5, kSeeds = 10;
  const std::size_t bound = kK * (static_cast<std::size_t>(std::ceil(std::log2(kN))) + 4);  // 70
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::ostringstream detail;
  for (auto model : {harness::ModelKind::Kernel, harness::ModelKind::Spline}) {
    detail << (model == harness::ModelKind::Kernel ? "kernel:" : " spline:");
    for (std::size_t i = 0; i < kSeeds; ++i) {
      const auto cfg = detail::threshold_config(kN, kK, model, harness::Strategy::FunctionNorm,
                                                bound, seed + i);
      const auto task = harness::make_task(cfg);
      for (double len : task.thresholds->piece_lengths())
        if (len < 0.1 || len > 0.4) ok = false;
      const auto rec = harness::run_on_task(cfg, task);
      if (rec.queries_to_zero) {
        detail << ' ' << *rec.queries_to_zero;
      } else {
        detail << " >" << bound;
        ok = false;
      }
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs >= 60.0) ok = false;
  detail << " (bound " << bound << ", " << secs << " s)";
  return {"1", "bisection label complexity", ok, detail.str()};
}

// --- 2. midpoint optimality and closed forms --------------------------------

inline CheckResult check_midpoint_closed_forms() {
  constexpr double kH = 0.1;
  constexpr std::size_t kSteps = 10000;
  bool ok = true;
  std::ostringstream detail;
  for (double gap : {0.05, 0.3, 1.0}) {
    for (int second : {-1, 1}) {
      const KernelConfig cfg{kH, 1.0};
      const auto m = fit(detail::labeled_1d({0.0, gap}, {1, second}), cfg);
      const double step = gap / static_cast<double>(kSteps);
      double best = -1.0, best_u = 0.0;
      for (std::size_t i = 1; i < kSteps; ++i) {
        const double u = step * static_cast<double>(i);
        const double s = score_function_norm(m, Eigen::VectorXd::Constant(1, u)).score;
        if (s > best) {
          best = s;
          best_u = u;
        }
      }
      const double expected = second == -1 ? 4.0 / (1.0 - std::exp(-gap / kH)) - 1.0
                                           : 4.0 / (1.0 + std::exp(-gap / (2.0 * kH))) - 1.0;
      const double err = detail::rel_diff(best, expected);
      const bool here = std::abs(best_u - gap / 2.0) <= step * (1.0 + 1e-9) && err <= 1e-9;
      ok = ok && here;
      detail << "g=" << gap << (second == -1 ? " opp" : " same") << " rel=" << err << "; ";
    }
  }
  return {"2", "midpoint optimality and closed forms", ok, detail.str()};
}

// --- 3. rank-one identity ---------------------------------------------------

inline CheckResult check_rank_one_identity(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t failures = 0, label_mismatch = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + rng() % 5;
    const std::size_t L = 1 + rng() % 50;
    const KernelConfig cfg{0.1 + 0.9 * unit(rng), trial % 2 == 0 ? 1.0 : 2.0};
    LabeledSet base;
    while (base.size() < L) base.add(Eigen::VectorXd::NullaryExpr(d, [&] { return unit(rng); }),
                                     unit(rng) < 0.5 ? 1 : -1);
    const Eigen::VectorXd u = Eigen::VectorXd::NullaryExpr(d, [&] { return unit(rng); });
    const auto m = fit(base, cfg);
    const auto scored = score_function_norm(m, u);

    double refit[2];
    for (int t : {1, -1}) {
      LabeledSet aug = base;
      aug.add(u, t);
      refit[t == 1 ? 0 : 1] = fit(aug, cfg).norm_sq();
    }
    const double best = std::min(refit[0], refit[1]);
    const double incr_schur = rank_one_increment(m, u, scored.label);
    const double incr_refit = refit[scored.label == 1 ? 0 : 1] - m.norm_sq();
    const double e1 = detail::rel_diff(scored.score, best);
    const double e2 = std::abs(incr_schur - incr_refit) / std::max(1.0, best);
    worst = std::max({worst, e1, e2});
    if (e1 > 1e-8 || e2 > 1e-8) ++failures;
    const int refit_label = refit[0] <= refit[1] ? 1 : -1;
    if (refit_label != scored.label && detail::rel_diff(refit[0], refit[1]) > 1e-9) ++label_mismatch;
  }
  std::ostringstream detail;
  detail << "worst rel " << worst << ", failures " << failures << ", label mismatches "
         << label_mismatch;
  return {"3", "rank-one identity", failures == 0 && label_mismatch == 0, detail.str()};
}

// --- 4. tridiagonal inverse and norm closed form ----------------------------

inline CheckResult check_laplace_closed_forms(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_inv = 0.0, worst_norm = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 20;
    const double h = 0.1 + 0.9 * unit(rng);
    std::vector<double> xs;
    std::vector<int> ys;
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(2.0 * unit(rng));
      ys.push_back(unit(rng) < 0.5 ? 1 : -1);
    }
    const laplace::SortedLabeled1D s(xs, ys, h);
    Eigen::MatrixXd pts(1, static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) pts(0, static_cast<Eigen::Index>(i)) = s.positions()[i];
    const Eigen::MatrixXd K = gram_matrix(pts, s.kernel());
    const Eigen::MatrixXd dense_inv = K.inverse();
    const Eigen::MatrixXd closed = laplace::tridiagonal_inverse(s).dense();
    const double scale = std::max(1.0, dense_inv.cwiseAbs().maxCoeff());
    worst_inv = std::max(worst_inv, (closed - dense_inv).cwiseAbs().maxCoeff() / scale);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) y[static_cast<Eigen::Index>(i)] = s.labels()[i];
    const double dense_norm = y.dot(K.llt().solve(y));
    worst_norm = std::max(worst_norm, detail::rel_diff(laplace::norm_closed_form(s), dense_norm));
  }
  std::ostringstream detail;
  detail << "worst inverse rel " << worst_inv << ", worst norm rel " << worst_norm;
  return {"4", "tridiagonal and norm closed forms", worst_inv <= 1e-9 && worst_norm <= 1e-9,
          detail.str()};
}

// --- 5. first point in the largest ball -------------------------------------

inline synthetic::ClusterSpec first_point_spec(double h) {
  constexpr std::size_t kM = 5;
  constexpr double kDim = 2.0;
  const double r1 = h / 2.0;
  const std::vector<double> radii = {r1, 0.6 * r1, 0.55 * r1, 0.5 * r1, 0.45 * r1};
  const double bound =
      0.5 * h * (std::log(static_cast<double>(kM)) - std::log(1.0 - std::pow(0.6, kDim)));
  const double D = 1.2 * bound;
  synthetic::ClusterSpec spec;
  spec.p = 2.0;
  for (std::size_t i = 0; i < kM; ++i) {
    synthetic::Ball b;
    b.center = Eigen::Vector2d(static_cast<double>(i) * (D + 2.0 * r1), 0.0);
    b.radius = radii[i];
    b.label = i % 2 == 0 ? 1 : -1;
    // Uniform over the union: counts proportional to area.
    b.count = static_cast<std::size_t>(std::lround(300.0 * std::pow(radii[i] / r1, kDim)));
    spec.balls.push_back(std::move(b));
  }
  return spec;
}

inline CheckResult check_first_point(std::uint64_t seed) {
  const KernelConfig cfg{0.1, 2.0};
  const auto spec = first_point_spec(cfg.bandwidth);
  const auto regime = synthetic::validate_regime(spec, cfg, synthetic::Regime::FirstPoint);
  std::size_t hits = 0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto data = synthetic::gen_clusters(spec, seed + i);
    const KernelInterpolator empty(cfg);
    const auto pick = select_next(empty, data.pool, ScoreKind::DataNorm, seed + i);
    if (data.membership[pick.index] == 0) ++hits;
  }
  std::ostringstream detail;
  detail << "regime " << (regime.holds ? "ok" : "VIOLATED") << ", " << hits << "/10 in B1";
  return {"5", "first point in largest ball", regime.holds && hits == 10, detail.str()};
}

// --- 6. cluster exploration -------------------------------------------------

inline synthetic::ClusterSpec explore_spec(double h) {
  constexpr std::size_t kM = 13;
  const double D = 13.0 * h * std::log(2.0 * kM);
  // Mixed labels: alternate on the grid.
  return synthetic::grid_layout(kM, h / 4.0, D, 2, 2.0, 30);
}

inline CheckResult check_cluster_exploration(std::uint64_t seed) {
  const KernelConfig cfg{0.1, 2.0};
  const auto spec = explore_spec(cfg.bandwidth);
  const auto regime =
      synthetic::validate_regime(spec, cfg, synthetic::Regime::ClusterExplore);
  constexpr std::size_t kSeeds = 10, kM = 13;
  std::size_t data_full = 0, function_gaps = 0;
  for (std::uint64_t i = 0; i < kSeeds; ++i) {
    for (auto strategy : {harness::Strategy::DataNorm, harness::Strategy::FunctionNorm}) {
      harness::ExperimentConfig c;
      c.task.kind = harness::TaskKind::Clusters;
      c.task.clusters = spec;
      c.model.kernel = cfg;
      c.strategy = strategy;
      c.budget = kM;
      c.seed = seed + i;
      const auto rec = harness::run_experiment(c);
      const auto unlabeled = static_cast<std::size_t>(
          std::count(rec.cluster_counts.begin(), rec.cluster_counts.end(), std::size_t{0}));
      if (strategy == harness::Strategy::DataNorm && unlabeled == 0) ++data_full;
      if (strategy == harness::Strategy::FunctionNorm && unlabeled >= 1) ++function_gaps;
    }
  }
  const bool ok = regime.holds && data_full == kSeeds && 2 * function_gaps > kSeeds;
  std::ostringstream detail;
  detail << "regime " << (regime.holds ? "ok" : "VIOLATED") << ", data-norm all 13 clusters in "
         << data_full << "/10 seeds, function-norm left a cluster unlabeled in " << function_gaps
         << "/10 seeds";
  return {"6", "cluster exploration", ok, detail.str()};
}

// --- 7. spline bisection properties ----------------------------------------

struct SplineViolations {
  std::size_t by_property[8] = {};
  std::size_t total() const {
    std::size_t t = 0;
    for (auto v : by_property) t += v;
    return t;
  }
};

/// Checks the four function-norm and four data-norm bisection properties on one
/// knot configuration, with `grid` interior candidates per interval.
inline void check_spline_properties(const spline::SplineInterpolator& m,
                                    const spline::Density1D& density, std::size_t grid,
                                    SplineViolations& v) {
  const auto& x = m.knots();
  const auto& y = m.values();
  constexpr double kTol = 1e-12;
  struct Interval {
    double mid, width, f_mid, d_mid;
    std::vector<double> f, d;
  };
  std::vector<Interval> opposite, same;
  // Real intervals only: knots 1..n.
  for (std::size_t j = 1; j + 2 < x.size(); ++j) {
    Interval iv;
    iv.width = x[j + 1] - x[j];
    iv.mid = 0.5 * (x[j] + x[j + 1]);
    iv.f_mid = spline::spline_score_function_norm(m, iv.mid).score;
    iv.d_mid = spline::spline_score_data_norm(m, iv.mid, density).score;
    for (std::size_t g = 1; g <= grid; ++g) {
      const double u = x[j] + iv.width * static_cast<double>(g) / static_cast<double>(grid + 1);
      iv.f.push_back(spline::spline_score_function_norm(m, u).score);
      iv.d.push_back(spline::spline_score_data_norm(m, u, density).score);
    }
    (y[j] != y[j + 1] ? opposite : same).push_back(std::move(iv));
  }
  const double scale = std::max(1.0, m.weight_norm());
  for (const auto& iv : opposite) {
    for (double s : iv.f)
      if (s > iv.f_mid + kTol * scale) ++v.by_property[0];
    for (double s : iv.d)
      if (s > iv.d_mid + kTol) ++v.by_property[4];
  }
  for (const auto& a : opposite)
    for (const auto& b : opposite) {
      if (a.width < b.width) continue;
      if (a.f_mid > b.f_mid + kTol * scale) ++v.by_property[1];
      if (a.d_mid + kTol < b.d_mid) ++v.by_property[5];
    }
  for (const auto& iv : same) {
    for (double s : iv.f)
      if (s != iv.f.front() || std::abs(s - m.weight_norm()) > kTol * scale) ++v.by_property[2];
    for (double s : iv.d)
      if (s != 0.0) ++v.by_property[6];
  }
  for (const auto& o : opposite)
    for (const auto& s : same) {
      const double of = *std::min_element(o.f.begin(), o.f.end());
      const double sf = *std::max_element(s.f.begin(), s.f.end());
      if (sf > of + kTol * scale) ++v.by_property[3];
      const double od = *std::min_element(o.d.begin(), o.d.end());
      const double sd = *std::max_element(s.d.begin(), s.d.end());
      if (sd > od) ++v.by_property[7];
    }
}

inline CheckResult check_spline_bisection(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SplineViolations v;
  const auto density = spline::Density1D::uniform(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> xs;
    std::vector<int> ys;
    // Resample until both interval types are present, with two opposite pairs.
    for (;;) {
      const std::size_t n = 4 + rng() % 9;
      xs.clear();
      ys.clear();
      for (std::size_t i = 0; i < n; ++i) {
        xs.push_back(unit(rng));
        ys.push_back(unit(rng) < 0.5 ? 1 : -1);
      }
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
      std::size_t opp = 0, same = 0;
      for (std::size_t i = 0; i + 1 < n; ++i)
        (ys[order[i]] != ys[order[i + 1]] ? opp : same)++;
      if (opp >= 2 && same >= 1) break;
    }
    check_spline_properties(spline::fit_spline(xs, ys), density, 64, v);
  }
  std::ostringstream detail;
  detail << "violations F1-F4/D1-D4:";
  for (auto c : v.by_property) detail << ' ' << c;
  return {"7", "spline bisection properties", v.total() == 0, detail.str()};
}

// --- 8. spline data-norm value ----------------------------------------------

inline CheckResult check_spline_data_value() {
  const std::vector<double> xs = {0.0, 1.0};
  const std::vector<int> ys = {1, -1};
  const auto m = spline::fit_spline(xs, ys);
  const double s =
      spline::spline_score_data_norm(m, 0.5, spline::Density1D::uniform(0.0, 1.0)).score;
  std::ostringstream detail;
  detail << "score " << s << " vs 1/3";
  return {"8", "spline data-norm value", std::abs(s - 1.0 / 3.0) <= 1e-6, detail.str()};
}

// --- 9. zero-crossing maximizer ---------------------------------------------

inline CheckResult check_zero_crossing(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr std::size_t kGrid = 10000;
  std::size_t failures = 0;
  double worst_steps = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double p = trial % 2 == 0 ? 1.0 : 2.0;
    const double h = 0.5 + 1.5 * unit(rng);
    const double delta = 20.0 * std::pow(h, 1.0 / p);
    const double x1 = 0.0;
    const double x2 = x1 + delta * (1.0 + unit(rng));
    // Gaps past ~2 delta push f at the midpoint below double resolution.
    const double x3 = x2 + delta * (1.0 + unit(rng));
    const auto m = fit(detail::labeled_1d({x1, x2, x3}, {1, 1, -1}), KernelConfig{h, p});
    const double step = (x3 - x2) / static_cast<double>(kGrid);
    double best = -1.0, best_u = 0.0, crossing = 0.0, prev_f = 1.0;
    bool found = false;
    for (std::size_t i = 1; i < kGrid; ++i) {
      const double u = x2 + step * static_cast<double>(i);
      const Eigen::VectorXd uv = Eigen::VectorXd::Constant(1, u);
      const double f = m.evaluate(uv);
      if (!found && prev_f >= 0.0 && f < 0.0) {
        crossing = u - step * f / (f - prev_f);  // linear interpolation of the root
        found = true;
      }
      prev_f = f;
      const double s = score_function_norm(m, uv).score;
      if (s > best) {
        best = s;
        best_u = u;
      }
    }
    const double off = std::abs(best_u - crossing) / step;
    worst_steps = std::max(worst_steps, off);
    if (!found || off > 1.0) ++failures;
  }
  std::ostringstream detail;
  detail << failures << " failures, worst offset " << worst_steps << " grid steps";
  return {"9", "zero-crossing maximizer", failures == 0, detail.str()};
}

// --- 10. active vs random ---------------------------------------------------

inline CheckResult check_active_vs_random(std::uint64_t seed) {
  constexpr std::size_t kN = 1024, kK = 5, kSeeds = 20;
  double medians[3];
  const harness::Strategy strategies[3] = {harness::Strategy::FunctionNorm,
                                           harness::Strategy::DataNorm, harness::Strategy::Random};
  for (int s = 0; s < 3; ++s) {
    std::vector<harness::RunRecord> runs;
    for (std::size_t i = 0; i < kSeeds; ++i)
      runs.push_back(harness::run_experiment(detail::threshold_config(
          kN, kK, harness::ModelKind::Kernel, strategies[s], kN, seed + i)));
    medians[s] = harness::summarize(runs).median_queries_to_zero;
  }
  const bool ok = medians[0] <= 0.5 * medians[2] && medians[1] <= 0.5 * medians[2];
  std::ostringstream detail;
  detail << "median queries-to-zero: function " << medians[0] << ", data " << medians[1]
         << ", random " << medians[2];
  return {"10", "active-vs-random dominance", ok, detail.str()};
}

inline std::vector<CheckResult> run_suite(Suite suite, std::uint64_t seed) {
  switch (suite) {
    case Suite::Bisection:
      return {check_bisection_complexity(seed), check_midpoint_closed_forms(),
              check_zero_crossing(seed), check_active_vs_random(seed)};
    case Suite::Identities:
      return {check_rank_one_identity(seed), check_laplace_closed_forms(seed)};
    case Suite::Clusters:
      return {check_first_point(seed), check_cluster_exploration(seed)};
    case Suite::Splines:
      return {check_spline_bisection(seed), check_spline_data_value()};
  }
  return {};
}

inline std::string format(const CheckResult& r) {
  return std::string(r.passed ? "PASS" : "FAIL") + "  [" + r.id + "] " + r.name + ": " + r.detail;
}

}  // namespace maximin::checks
