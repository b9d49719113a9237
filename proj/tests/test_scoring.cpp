#include <cmath>
#include <map>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "maximin/scoring.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace maximin;
using support::pt;

namespace {

UnlabeledPool grid_pool(double lo, double hi, std::size_t n) {
  UnlabeledPool pool;
  pool.points.resize(1, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    pool.points(0, static_cast<Eigen::Index>(i)) =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return pool;
}

KernelInterpolator fit_1d(std::vector<double> xs, std::vector<int> ys, double h) {
  LabeledSet s;
  for (std::size_t i = 0; i < xs.size(); ++i) s.add(pt({xs[i]}), ys[i]);
  return fit(s, {h, 1.0});
}

}  // namespace

TEST(EstimateLabel, SignRule) {
  EXPECT_EQ(sign_label(0.3), 1);
  EXPECT_EQ(sign_label(0.0), 1);
  EXPECT_EQ(sign_label(-0.2), -1);
}

TEST(FunctionNorm, EmptyModelScoresOne) {
  const KernelInterpolator m(KernelConfig{0.1, 2.0});
  for (double x : {-3.0, 0.0, 0.4}) EXPECT_DOUBLE_EQ(score_function_norm(m, pt({x, 1.0})).score, 1.0);
}

TEST(FunctionNorm, MidpointOfOppositePair) {
  const double h = 0.1, x1 = 0.2, x3 = 0.5;
  const auto m = fit_1d({x1, x3}, {1, -1}, h);
  const double expected = 4.0 / (1.0 - std::exp(-(x3 - x1) / h)) - 1.0;
  EXPECT_NEAR(score_function_norm(m, pt({0.5 * (x1 + x3)})).score, expected, 1e-12 * expected);
}

TEST(FunctionNorm, MatchesTwoRefitOracle) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t d = 1 + rng() % 3;
    const double h = 0.2 + 0.5 * unit(rng), p = trial % 2 == 0 ? 1.0 : 2.0;
    auto r = support::random_set(rng, 1 + rng() % 15, d);
    const auto m = fit(r.set, {h, p});
    oracle::Vec u(d);
    for (auto& c : u) c = unit(rng);
    const auto [norm, label] = oracle::refit_score(r.xs, r.ys, u, h, p);
    const auto got = score_function_norm(m, support::to_eigen(u));
    EXPECT_NEAR(got.score, norm, 1e-9 * norm);
    EXPECT_EQ(got.label, label);
    EXPECT_TRUE(std::isfinite(got.score));
  }
}

TEST(FunctionNorm, DuplicateCandidateThrows) {
  const auto m = fit_1d({0.1, 0.9}, {1, -1}, 0.2);
  EXPECT_THROW(score_function_norm(m, pt({0.9})), DuplicatePointError);
}

TEST(DataNorm, EmptyModelIsMeanSquaredKernel) {
  const KernelConfig cfg{0.3, 1.0};
  const KernelInterpolator m(cfg);
  const auto pool = grid_pool(0.0, 1.0, 17);
  const oracle::Vec u = {0.35};
  double expected = 0.0;
  for (Eigen::Index j = 0; j < pool.points.cols(); ++j) {
    const double k = oracle::kernel(u, {pool.points(0, j)}, cfg.bandwidth, cfg.exponent);
    expected += k * k;
  }
  expected /= 17.0;
  EXPECT_NEAR(score_data_norm(m, support::to_eigen(u), pool).score, expected, 1e-14);
}

TEST(DataNorm, MatchesRefitOracle) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 1 + rng() % 2;
    const double h = 0.2 + 0.5 * unit(rng), p = trial % 2 == 0 ? 1.0 : 2.0;
    auto r = support::random_set(rng, 1 + rng() % 10, d);
    auto pool_set = support::random_set(rng, 30, d);
    UnlabeledPool pool;
    pool.points = pool_set.set.points();
    const auto m = fit(r.set, {h, p});
    // Score every pool point with the batch path and compare a few with the oracle.
    const auto batch = score_pool(m, pool, ScoreKind::DataNorm);
    for (std::size_t j = 0; j < 30; j += 7) {
      const auto u = pool_set.xs[j];
      const double ref = oracle::refit_data_score(r.xs, r.ys, u, pool_set.xs, h, p);
      EXPECT_NEAR(batch[j].score, ref, 1e-8 * (ref + 1e-12));
      EXPECT_NEAR(score_data_norm(m, support::to_eigen(u), pool).score, ref, 1e-8 * (ref + 1e-12));
    }
  }
}

TEST(DataNorm, MirrorSymmetricCandidatesTie) {
  const auto m = fit_1d({-0.3, 0.3}, {1, 1}, 0.2);
  // 40 points: symmetric about 0 and never hitting +-0.3.
  const auto pool = grid_pool(-1.0, 1.0, 40);
  const auto s = score_pool(m, pool, ScoreKind::DataNorm);
  const auto f = score_pool(m, pool, ScoreKind::FunctionNorm);
  for (std::size_t j = 0; j < 40; ++j) {
    EXPECT_NEAR(s[j].score, s[39 - j].score, 1e-12 * (1.0 + s[j].score));
    EXPECT_NEAR(f[j].score, f[39 - j].score, 1e-12 * f[j].score);
  }
}

TEST(DataNorm, EmptyPoolThrows) {
  const KernelInterpolator m(KernelConfig{});
  EXPECT_THROW(score_data_norm(m, pt({0.0}), UnlabeledPool{}), EmptyPoolError);
}

TEST(ScorePool, BatchMatchesPointwiseFunctionNorm) {
  std::mt19937_64 rng(23);
  auto r = support::random_set(rng, 12, 2);
  auto pool_set = support::random_set(rng, 50, 2);
  UnlabeledPool pool;
  pool.points = pool_set.set.points();
  const auto m = fit(r.set, {0.3, 2.0});
  const auto batch = score_pool(m, pool, ScoreKind::FunctionNorm);
  for (std::size_t j = 0; j < 50; ++j) {
    const auto one = score_function_norm(m, pool.point(j));
    EXPECT_NEAR(batch[j].score, one.score, 1e-12 * one.score);
    EXPECT_EQ(batch[j].label, one.label);
    EXPECT_EQ(batch[j].index, j);
  }
}

TEST(SelectNext, EmptyPoolThrows) {
  const KernelInterpolator m(KernelConfig{});
  EXPECT_THROW(select_next(m, UnlabeledPool{}, ScoreKind::FunctionNorm, 1), EmptyPoolError);
}

TEST(SelectNext, PoolOfOne) {
  const KernelInterpolator m(KernelConfig{});
  EXPECT_EQ(select_next(m, grid_pool(0.3, 0.3, 1), ScoreKind::DataNorm, 9).index, 0u);
}

TEST(SelectNext, GridBetweenOppositeNeighborsPicksMidpoint) {
  const auto m = fit_1d({0.0, 1.0}, {1, -1}, 0.1);
  // 0 and 1 themselves are excluded; the midpoint 0.5 is grid point 50.
  UnlabeledPool pool;
  pool.points.resize(1, 99);
  for (int i = 1; i <= 99; ++i) pool.points(0, i - 1) = i / 100.0;
  EXPECT_DOUBLE_EQ(pool.points(0, select_next(m, pool, ScoreKind::FunctionNorm, 3).index), 0.5);
}

TEST(SelectNext, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    auto r = support::random_set(rng, 6, 2);
    auto pool_set = support::random_set(rng, 40, 2);
    UnlabeledPool pool;
    pool.points = pool_set.set.points();
    const auto m = fit(r.set, {0.3, 1.0});
    const auto scored = score_pool(m, pool, ScoreKind::FunctionNorm);
    std::vector<double> raw, rooted;
    for (const auto& c : scored) {
      raw.push_back(c.score);
      rooted.push_back(std::sqrt(c.score));
    }
    EXPECT_EQ(select_argmax(raw, 100 + trial, 0.0), select_argmax(rooted, 100 + trial, 0.0));
  }
}

TEST(SelectArgmax, RejectsNonFinite) {
  const std::vector<double> s = {1.0, NAN};
  EXPECT_THROW(select_argmax(s, 1), ArgumentError);
}

TEST(SelectArgmax, DeterministicForSeed) {
  const std::vector<double> s(10, 2.0);
  EXPECT_EQ(select_argmax(s, 77), select_argmax(s, 77));
}

TEST(SelectArgmax, TiesAreUniform) {
  // Empty model, function norm: every candidate scores 1.
  const KernelInterpolator m(KernelConfig{0.1, 1.0});
  const auto pool = grid_pool(0.0, 1.0, 10);
  std::vector<double> counts(10, 0.0);
  constexpr int kDraws = 10000;
  for (int i = 0; i < kDraws; ++i)
    counts[select_next(m, pool, ScoreKind::FunctionNorm, static_cast<std::uint64_t>(i)).index] += 1.0;
  double stat = 0.0;
  const double expected = kDraws / 10.0;
  for (double c : counts) stat += (c - expected) * (c - expected) / expected;
  EXPECT_GT(oracle::chi_square_sf(stat, 9.0), 0.01) << "chi-square " << stat;
}

TEST(ChiSquareOracle, KnownQuantiles) {
  // Critical values: P(chi2_9 > 21.666) = 0.01, P(chi2_2 > x) = exp(-x/2).
  EXPECT_NEAR(oracle::chi_square_sf(21.666, 9.0), 0.01, 1e-4);
  EXPECT_NEAR(oracle::chi_square_sf(3.0, 2.0), std::exp(-1.5), 1e-10);
  EXPECT_NEAR(oracle::chi_square_sf(0.5, 2.0), std::exp(-0.25), 1e-10);
}
