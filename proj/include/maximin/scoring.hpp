#pragma once

// MaxiMin selection over a pool of unlabeled candidates.
//
// Both scores come from the rank-one update of the interpolant: adding (u, t)
// to the labeled set changes f by
//
//   f^u(x) - f(x) = (t - f(u)) / s_u * (k(u, x) - a_u^T K^{-1} a_x),
//   s_u = 1 - a_u^T K^{-1} a_u,
//
// and raises norm_sq by (1 - t f(u))^2 / s_u. The label minimizing that
// increment is t(u) = sign(f(u)) with sign(0) = +1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "maximin/errors.hpp"
#include "maximin/kernel.hpp"

namespace maximin {

/// Candidate points (columns) awaiting labels. Oracle labels are only
/// present in simulations.
struct UnlabeledPool {
  Eigen::MatrixXd points;  // d x N
  std::optional<std::vector<int>> oracle;

  std::size_t size() const noexcept { return static_cast<std::size_t>(points.cols()); }
  bool empty() const noexcept { return size() == 0; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(points.rows()); }
  auto point(std::size_t i) const { return points.col(static_cast<Eigen::Index>(i)); }

  void validate() const {
    if (oracle) {
      if (oracle->size() != size()) throw ArgumentError("oracle label count does not match pool");
      for (int y : *oracle) check_label(y);
    }
  }
};

enum class ScoreKind { FunctionNorm, DataNorm };

inline std::string to_string(ScoreKind kind) {
  return kind == ScoreKind::FunctionNorm ? "function" : "data";
}

struct ScoredCandidate {
  std::size_t index = 0;
  int label = 1;  // t(u)
  double score = 0.0;
};

inline constexpr double kTieTolerance = 1e-12;

inline int sign_label(double f) { return f >= 0.0 ? 1 : -1; }

inline int estimate_label(const KernelInterpolator& m, const PointRef& u) {
  return sign_label(m.evaluate(u));
}

inline ScoredCandidate score_function_norm(const KernelInterpolator& m, const PointRef& u,
                                           std::size_t index = 0) {
  const Eigen::VectorXd a = m.kernel_column(u);
  const double schur = 1.0 + m.jitter() - m.leverage(a);
  if (!(schur >= kSchurFloor))
    throw DuplicatePointError("candidate is numerically coincident with the labeled set");
  const double f = m.empty() ? 0.0 : m.coefficients().dot(a);
  const double r = 1.0 - std::abs(f);
  return {index, sign_label(f), m.norm_sq() + r * r / schur};
}

/// Precomputed kernel quantities for scoring a batch of candidates that also
/// serve as the empirical measure.
struct PoolKernels {
  Eigen::MatrixXd cross;  // L x N, k(x_i, pool_j)
  Eigen::MatrixXd gram;   // N x N, only needed for DataNorm

  static PoolKernels compute(const KernelInterpolator& m, const UnlabeledPool& pool,
                             bool with_gram) {
    PoolKernels pk;
    pk.cross = m.empty() ? Eigen::MatrixXd(0, pool.points.cols())
                         : cross_kernel_matrix(m.base().points(), pool.points, m.config());
    if (with_gram) pk.gram = gram_matrix(pool.points, m.config());
    return pk;
  }
};

/// Scores every pool point as a candidate. `pk` must match `m` and the pool.
inline std::vector<ScoredCandidate> score_pool(const KernelInterpolator& m, const PoolKernels& pk,
                                               ScoreKind kind) {
  const Eigen::Index n = pk.cross.cols();
  if (static_cast<std::size_t>(pk.cross.rows()) != m.size())
    throw ArgumentError("cross-kernel rows do not match the labeled set");
  std::vector<ScoredCandidate> out(static_cast<std::size_t>(n));
  if (n == 0) return out;

  const Eigen::MatrixXd V = m.whiten(pk.cross);  // L x N
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  if (!m.empty()) f = pk.cross.transpose() * m.coefficients();
  const Eigen::VectorXd schur =
      (1.0 + m.jitter()) - V.colwise().squaredNorm().transpose().array();

  Eigen::VectorXd spread;
  if (kind == ScoreKind::DataNorm) {
    if (pk.gram.rows() != n || pk.gram.cols() != n)
      throw ArgumentError("data-norm scoring needs the pool Gram matrix");
    Eigen::MatrixXd R = pk.gram;
    if (V.rows() > 0) R.noalias() -= V.transpose() * V;
    spread = R.rowwise().squaredNorm() / static_cast<double>(n);
  }

  for (Eigen::Index j = 0; j < n; ++j) {
    const double s = schur[j];
    if (!(s >= kSchurFloor))
      throw DuplicatePointError("pool point " + std::to_string(j) +
                                " is numerically coincident with the labeled set");
    const int t = sign_label(f[j]);
    double score;
    if (kind == ScoreKind::FunctionNorm) {
      const double r = 1.0 - std::abs(f[j]);
      score = m.norm_sq() + r * r / s;
    } else {
      const double c = (t - f[j]) / s;
      score = c * c * spread[j];
    }
    out[static_cast<std::size_t>(j)] = {static_cast<std::size_t>(j), t, score};
  }
  return out;
}

inline std::vector<ScoredCandidate> score_pool(const KernelInterpolator& m,
                                               const UnlabeledPool& pool, ScoreKind kind) {
  if (!m.empty() && pool.dim() != m.base().dim())
    throw ArgumentError("pool dimension does not match the model");
  return score_pool(m, PoolKernels::compute(m, pool, kind == ScoreKind::DataNorm), kind);
}

/// Mean over the pool of (f^u(x) - f(x))^2, with t(u) from the function-norm rule.
inline ScoredCandidate score_data_norm(const KernelInterpolator& m, const PointRef& u,
                                       const UnlabeledPool& pool, std::size_t index = 0) {
  if (pool.empty()) throw EmptyPoolError("data-norm score needs a nonempty pool");
  m.check_dim(u);
  if (static_cast<std::size_t>(u.size()) != pool.dim())
    throw ArgumentError("candidate dimension does not match the pool");

  const Eigen::VectorXd a = m.kernel_column(u);
  const Eigen::VectorXd v = m.whiten(a);
  const double schur = 1.0 + m.jitter() - v.squaredNorm();
  if (!(schur >= kSchurFloor))
    throw DuplicatePointError("candidate is numerically coincident with the labeled set");
  const double f = m.empty() ? 0.0 : m.coefficients().dot(a);
  const int t = sign_label(f);

  Eigen::VectorXd r(pool.points.cols());
  for (Eigen::Index j = 0; j < r.size(); ++j) r[j] = kernel_eval(u, pool.points.col(j), m.config());
  if (!m.empty()) {
    const Eigen::MatrixXd A = cross_kernel_matrix(m.base().points(), pool.points, m.config());
    r.noalias() -= m.whiten(A).transpose() * v;
  }
  const double c = (t - f) / schur;
  return {index, t, c * c * r.squaredNorm() / static_cast<double>(r.size())};
}

/// Index of a maximizer of `scores`; candidates within `tol` of the maximum are
/// tied and one is drawn uniformly with a generator seeded by `seed`.
inline std::size_t select_argmax(std::span<const double> scores, std::uint64_t seed,
                                 double tol = kTieTolerance) {
  if (scores.empty()) throw EmptyPoolError("cannot select from an empty pool");
  double best = -std::numeric_limits<double>::infinity();
  for (double s : scores) {
    if (!std::isfinite(s)) throw ArgumentError("non-finite score");
    best = std::max(best, s);
  }
  std::vector<std::size_t> ties;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i] >= best - tol) ties.push_back(i);
  if (ties.size() == 1) return ties.front();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, ties.size() - 1);
  return ties[pick(rng)];
}

inline ScoredCandidate select_from(const std::vector<ScoredCandidate>& scored,
                                   std::uint64_t seed) {
  std::vector<double> values(scored.size());
  for (std::size_t i = 0; i < scored.size(); ++i) values[i] = scored[i].score;
  return scored[select_argmax(values, seed)];
}

inline ScoredCandidate select_next(const KernelInterpolator& m, const UnlabeledPool& pool,
                                   ScoreKind kind, std::uint64_t seed) {
  if (pool.empty()) throw EmptyPoolError("cannot select from an empty pool");
  return select_from(score_pool(m, pool, kind), seed);
}

}  // namespace maximin
