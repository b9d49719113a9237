#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "maximin/kernel.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace maximin;
using support::pt;

TEST(KernelConfig, RejectsBadParameters) {
  EXPECT_THROW((KernelConfig{0.0, 1.0}.validate()), ArgumentError);
  EXPECT_THROW((KernelConfig{-1.0, 1.0}.validate()), ArgumentError);
  EXPECT_THROW((KernelConfig{1.0, 0.5}.validate()), ArgumentError);
  EXPECT_THROW((KernelConfig{NAN, 1.0}.validate()), ArgumentError);
  EXPECT_NO_THROW((KernelConfig{0.1, 1.0}.validate()));
  EXPECT_NO_THROW((KernelConfig{0.1, 3.5}.validate()));
}

TEST(Minkowski, KnownDistances) {
  EXPECT_DOUBLE_EQ(minkowski_distance(pt({0, 0}), pt({3, 4}), 2.0), 5.0);
  EXPECT_DOUBLE_EQ(minkowski_distance(pt({0, 0}), pt({3, 4}), 1.0), 7.0);
  EXPECT_NEAR(minkowski_distance(pt({0, 0}), pt({3, 4}), 3.0), std::cbrt(27.0 + 64.0), 1e-14);
  EXPECT_THROW(minkowski_distance(pt({0}), pt({0, 1}), 2.0), ArgumentError);
}

TEST(KernelEval, SelfIsOne) {
  const KernelConfig cfg{0.3, 1.7};
  EXPECT_EQ(kernel_eval(pt({0.2, -1.0}), pt({0.2, -1.0}), cfg), 1.0);
}

TEST(KernelEval, OneDimensionalValue) {
  EXPECT_NEAR(kernel_eval(pt({0}), pt({2}), {1.0, 1.0}), 0.135335283236612691, 1e-15);
}

TEST(KernelEval, MatchesOracleAndIsSymmetric) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const oracle::Vec a = {u(rng), u(rng), u(rng)}, b = {u(rng), u(rng), u(rng)};
    const KernelConfig cfg{0.05 + std::abs(u(rng)), 1.0 + 3.0 * std::abs(u(rng))};
    const double k = kernel_eval(support::to_eigen(a), support::to_eigen(b), cfg);
    EXPECT_NEAR(k, oracle::kernel(a, b, cfg.bandwidth, cfg.exponent), 1e-14);
    EXPECT_EQ(k, kernel_eval(support::to_eigen(b), support::to_eigen(a), cfg));
    EXPECT_GT(k, 0.0);
    EXPECT_LE(k, 1.0);
  }
}

TEST(KernelEval, DimensionMismatchThrows) {
  EXPECT_THROW(kernel_eval(pt({0}), pt({0, 0}), {}), ArgumentError);
}

TEST(LabeledSet, RejectsInvalidInput) {
  LabeledSet s;
  s.add(pt({0, 0}), 1);
  EXPECT_THROW(s.add(pt({0, 0}), -1), DuplicatePointError);
  EXPECT_THROW(s.add(pt({1, 0}), 0), ArgumentError);
  EXPECT_THROW(s.add(pt({1}), 1), ArgumentError);
  s.add(pt({1, 0}), -1);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.label(1), -1);
}

TEST(Fit, EmptySetThrows) {
  EXPECT_THROW(fit(LabeledSet{}, {}), ArgumentError);
}

TEST(Fit, SinglePoint) {
  LabeledSet s;
  s.add(pt({0.5}), 1);
  const auto m = fit(s, {1.0, 1.0});
  EXPECT_NEAR(m.coefficients()[0], 1.0, 1e-15);
  EXPECT_NEAR(m.norm_sq(), 1.0, 1e-15);
  EXPECT_NEAR(m.evaluate(pt({1.5})), std::exp(-1.0), 1e-15);
}

TEST(Fit, SinglePointAtOriginValue) {
  LabeledSet s;
  s.add(pt({0}), 1);
  EXPECT_NEAR(evaluate(fit(s, {1.0, 1.0}), pt({1})), std::exp(-1.0), 1e-15);
}

TEST(Fit, TwoPointLaplaceNorms) {
  const double d = 0.37, h = 0.2;
  for (int second : {-1, 1}) {
    LabeledSet s;
    s.add(pt({0.0}), 1);
    s.add(pt({d}), second);
    const double expected = second == -1 ? 2.0 / (1.0 - std::exp(-d / h)) : 2.0 / (1.0 + std::exp(-d / h));
    EXPECT_NEAR(fit(s, {h, 1.0}).norm_sq(), expected, 1e-12 * expected);
  }
}

TEST(Fit, MatchesDirectSolve) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 25, d = 1 + rng() % 4;
    const double h = 0.2 + 0.1 * static_cast<double>(rng() % 8);
    const double p = trial % 3 == 0 ? 1.0 : (trial % 3 == 1 ? 2.0 : 1.5);
    auto r = support::random_set(rng, n, d);
    const auto m = fit(r.set, {h, p});
    const auto ref = oracle::interpolate(r.xs, r.ys, h, p);
    for (std::size_t i = 0; i < n; ++i)
      EXPECT_NEAR(m.coefficients()[static_cast<Eigen::Index>(i)], ref.alpha[i],
                  1e-9 * (1.0 + std::abs(ref.alpha[i])));
    EXPECT_NEAR(m.norm_sq(), ref.norm_sq, 1e-9 * ref.norm_sq);
  }
}

TEST(Fit, InterpolatesLabelsAndNormIsNonNegative) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    auto r = support::random_set(rng, 1 + rng() % 40, 1 + rng() % 3);
    const auto m = fit(r.set, {0.3, trial % 2 == 0 ? 1.0 : 2.0});
    EXPECT_GE(m.norm_sq(), 0.0);
    for (std::size_t i = 0; i < r.set.size(); ++i)
      EXPECT_NEAR(m.evaluate(r.set.point(i)), r.set.label(i), 1e-8);
  }
}

TEST(Fit, FarFromDataIsNearZero) {
  std::mt19937_64 rng(13);
  auto r = support::random_set(rng, 10, 2);
  const double h = 0.1;
  const auto m = fit(r.set, {h, 2.0});
  const Eigen::VectorXd far = pt({1.0 + 40 * h, 1.0 + 40 * h});
  const auto ref = oracle::interpolate(r.xs, r.ys, h, 2.0);
  EXPECT_LT(std::abs(m.evaluate(far)), 1e-6);
  EXPECT_NEAR(m.evaluate(far), ref(support::to_vec(far)), 1e-15);
}

TEST(Fit, NearDuplicatePointsRaiseConditioningError) {
  // Four alternating labels packed 1e-13 apart: no rung of the jitter ladder
  // interpolates to tolerance.
  LabeledSet s;
  for (int i = 0; i < 4; ++i) s.add(pt({0.5 + i * 1e-13}), i % 2 == 0 ? 1 : -1);
  try {
    fit(s, {1.0, 1.0});
    FAIL() << "expected a conditioning error";
  } catch (const ConditioningError& e) {
    EXPECT_GT(e.condition_estimate(), 1e10);
  }
}

TEST(Fit, EvaluateRejectsWrongDimension) {
  LabeledSet s;
  s.add(pt({0.0, 0.0}), 1);
  const auto m = fit(s, {});
  EXPECT_THROW(m.evaluate(pt({0.0})), ArgumentError);
}

TEST(EmptyModel, IsZeroFunction) {
  const KernelInterpolator m(KernelConfig{0.1, 1.0});
  EXPECT_TRUE(m.empty());
  EXPECT_EQ(m.norm_sq(), 0.0);
  EXPECT_EQ(m.evaluate(pt({0.3})), 0.0);
}

TEST(AugmentedFit, FromEmptyGivesUnitNorm) {
  const KernelInterpolator m(KernelConfig{0.1, 1.0});
  const auto a = augmented_fit(m, pt({0.4, 2.0}), 1);
  EXPECT_NEAR(a.norm_sq(), 1.0, 1e-15);
  EXPECT_NEAR(a.evaluate(pt({0.4, 2.0})), 1.0, 1e-15);
}

TEST(AugmentedFit, MatchesFreshFit) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t d = 1 + rng() % 3;
    auto r = support::random_set(rng, 1 + rng() % 30, d);
    const KernelConfig cfg{0.25, trial % 2 == 0 ? 1.0 : 2.0};
    auto extra = support::random_set(rng, 1, d);
    const int t = extra.ys[0] > 0 ? 1 : -1;
    const auto aug = augmented_fit(fit(r.set, cfg), extra.set.point(0), t);
    LabeledSet all = r.set;
    all.add(extra.set.point(0), t);
    const auto fresh = fit(all, cfg);
    EXPECT_NEAR(aug.norm_sq(), fresh.norm_sq(), 1e-9 * fresh.norm_sq());
    EXPECT_LT((aug.coefficients() - fresh.coefficients()).cwiseAbs().maxCoeff(),
              1e-8 * (1.0 + fresh.coefficients().cwiseAbs().maxCoeff()));
    // Norm never decreases when a constraint is added.
    EXPECT_GE(aug.norm_sq(), fit(r.set, cfg).norm_sq() - 1e-12);
  }
}

TEST(AugmentedFit, DuplicateThrows) {
  LabeledSet s;
  s.add(pt({0.2}), 1);
  s.add(pt({0.7}), -1);
  const auto m = fit(s, {});
  EXPECT_THROW(augmented_fit(m, pt({0.7}), 1), DuplicatePointError);
  EXPECT_THROW(augmented_fit(m, pt({0.5}), 2), ArgumentError);
  EXPECT_THROW(augmented_fit(m, pt({0.5, 0.1}), 1), ArgumentError);
}

TEST(RankOneIncrement, EqualsRefitDifference) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 60; ++trial) {
    auto r = support::random_set(rng, 1 + rng() % 20, 2);
    const KernelConfig cfg{0.4, 1.0};
    const auto m = fit(r.set, cfg);
    const oracle::Vec u = {0.5 * static_cast<double>(rng() % 1000) / 1000.0, 0.37};
    for (int t : {1, -1}) {
      oracle::Points ax = r.xs;
      ax.push_back(u);
      oracle::Vec ay = r.ys;
      ay.push_back(t);
      const double refit = oracle::interpolate(ax, ay, cfg.bandwidth, cfg.exponent).norm_sq;
      EXPECT_NEAR(rank_one_increment(m, support::to_eigen(u), t), refit - m.norm_sq(),
                  1e-9 * refit);
    }
  }
}
