#pragma once

// Minimum-RKHS-norm interpolation with the radial-basis family
// k(x, x') = exp(-||x - x'||_p / h).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "maximin/errors.hpp"

namespace maximin {

using Point = Eigen::VectorXd;
using PointRef = Eigen::Ref<const Eigen::VectorXd>;

struct KernelConfig {
  double bandwidth = 0.1;  // h
  double exponent = 1.0;   // p of the Minkowski distance

  void validate() const {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
      throw ArgumentError("kernel bandwidth must be positive, got " + std::to_string(bandwidth));
    if (!(exponent >= 1.0) || !std::isfinite(exponent))
      throw ArgumentError("kernel exponent must be >= 1, got " + std::to_string(exponent));
  }
};

inline double minkowski_distance(const PointRef& a, const PointRef& b, double p) {
  if (a.size() != b.size())
    throw ArgumentError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()));
  if (p == 1.0) return (a - b).cwiseAbs().sum();
  if (p == 2.0) return (a - b).norm();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) acc += std::pow(std::abs(a[i] - b[i]), p);
  return std::pow(acc, 1.0 / p);
}

inline double kernel_eval(const PointRef& x, const PointRef& x2, const KernelConfig& cfg) {
  return std::exp(-minkowski_distance(x, x2, cfg.exponent) / cfg.bandwidth);
}

/// Kernel matrix between the columns of `a` (d x n) and `b` (d x m).
inline Eigen::MatrixXd cross_kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                           const KernelConfig& cfg) {
  if (a.cols() > 0 && b.cols() > 0 && a.rows() != b.rows())
    throw ArgumentError("dimension mismatch in kernel matrix");
  Eigen::MatrixXd out(a.cols(), b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j)
    for (Eigen::Index i = 0; i < a.cols(); ++i) out(i, j) = kernel_eval(a.col(i), b.col(j), cfg);
  return out;
}

/// Symmetric Gram matrix of the columns of `pts`; unit diagonal.
inline Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& pts, const KernelConfig& cfg) {
  const Eigen::Index n = pts.cols();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double k = kernel_eval(pts.col(i), pts.col(j), cfg);
      out(i, j) = k;
      out(j, i) = k;
    }
  }
  return out;
}

inline void check_label(int label) {
  if (label != 1 && label != -1)
    throw ArgumentError("labels must be +1 or -1, got " + std::to_string(label));
}

/// Ordered (point, +-1 label) pairs with pairwise-distinct points.
class LabeledSet {
 public:
  LabeledSet() = default;

  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.cols()); }
  bool empty() const noexcept { return size() == 0; }
  /// 0 until the first point fixes it.
  std::size_t dim() const noexcept { return static_cast<std::size_t>(points_.rows()); }

  const Eigen::MatrixXd& points() const noexcept { return points_; }
  const Eigen::VectorXd& labels() const noexcept { return labels_; }
  auto point(std::size_t i) const { return points_.col(static_cast<Eigen::Index>(i)); }
  int label(std::size_t i) const { return static_cast<int>(labels_[static_cast<Eigen::Index>(i)]); }

  void add(const PointRef& x, int label) {
    check_label(label);
    if (x.size() == 0) throw ArgumentError("points must have dimension >= 1");
    if (!empty() && static_cast<std::size_t>(x.size()) != dim())
      throw ArgumentError("dimension mismatch: set has d=" + std::to_string(dim()) +
                          ", point has d=" + std::to_string(x.size()));
    for (Eigen::Index i = 0; i < points_.cols(); ++i)
      if ((points_.col(i) - x).cwiseAbs().maxCoeff() == 0.0)
        throw DuplicatePointError("point duplicates labeled point " + std::to_string(i));
    const Eigen::Index n = points_.cols();
    Eigen::MatrixXd grown(x.size(), n + 1);
    if (n > 0) grown.leftCols(n) = points_;
    grown.col(n) = x;
    points_ = std::move(grown);
    labels_.conservativeResize(n + 1);
    labels_[n] = label;
  }

 private:
  Eigen::MatrixXd points_;  // d x L
  Eigen::VectorXd labels_;
};

/// Fitted minimum-norm interpolant f(x) = sum_i alpha_i k(x_i, x), alpha = K^{-1} y.
///
/// Immutable once built. The lower Cholesky factor of K (plus the recorded
/// diagonal jitter) is cached so that appending a point costs O(L^2).
class KernelInterpolator {
 public:
  /// The interpolant of the empty labeled set, f == 0.
  explicit KernelInterpolator(const KernelConfig& cfg) : config_(cfg) { cfg.validate(); }

  const LabeledSet& base() const noexcept { return base_; }
  const KernelConfig& config() const noexcept { return config_; }
  const Eigen::VectorXd& coefficients() const noexcept { return alpha_; }
  const Eigen::MatrixXd& cholesky_factor() const noexcept { return chol_; }
  double norm_sq() const noexcept { return norm_sq_; }
  double jitter() const noexcept { return jitter_; }
  std::size_t size() const noexcept { return base_.size(); }
  bool empty() const noexcept { return base_.empty(); }

  /// a_x = [k(x_1, x), ..., k(x_L, x)].
  Eigen::VectorXd kernel_column(const PointRef& x) const {
    check_dim(x);
    Eigen::VectorXd a(static_cast<Eigen::Index>(size()));
    for (Eigen::Index i = 0; i < a.size(); ++i)
      a[i] = kernel_eval(base_.point(static_cast<std::size_t>(i)), x, config_);
    return a;
  }

  double evaluate(const PointRef& x) const {
    if (empty()) return 0.0;
    return alpha_.dot(kernel_column(x));
  }

  /// L^{-1} b for the cached factor; columns are solved independently.
  Eigen::MatrixXd whiten(const Eigen::MatrixXd& b) const {
    if (empty()) return Eigen::MatrixXd(0, b.cols());
    return chol_.triangularView<Eigen::Lower>().solve(b);
  }

  /// a^T K^{-1} a for a precomputed kernel column.
  double leverage(const Eigen::VectorXd& a) const {
    if (empty()) return 0.0;
    return whiten(a).squaredNorm();
  }

  void check_dim(const PointRef& x) const {
    if (!empty() && static_cast<std::size_t>(x.size()) != base_.dim())
      throw ArgumentError("dimension mismatch: model has d=" + std::to_string(base_.dim()) +
                          ", query has d=" + std::to_string(x.size()));
  }

 private:
  friend KernelInterpolator fit(const LabeledSet&, const KernelConfig&);
  friend KernelInterpolator augmented_fit(const KernelInterpolator&, const PointRef&, int,
                                          const Eigen::VectorXd&);

  void solve_coefficients() {
    const Eigen::VectorXd& y = base_.labels();
    Eigen::VectorXd z = chol_.triangularView<Eigen::Lower>().solve(y);
    alpha_ = chol_.transpose().triangularView<Eigen::Upper>().solve(z);
    norm_sq_ = z.squaredNorm();
  }

  LabeledSet base_;
  KernelConfig config_;
  Eigen::VectorXd alpha_;
  Eigen::MatrixXd chol_;
  double norm_sq_ = 0.0;
  double jitter_ = 0.0;
};

inline constexpr std::array<double, 4> kJitterLadder = {0.0, 1e-12, 1e-10, 1e-8};
inline constexpr double kResidualTolerance = 1e-8;
inline constexpr double kSchurFloor = 1e-12;

inline KernelInterpolator fit(const LabeledSet& labeled, const KernelConfig& cfg) {
  cfg.validate();
  if (labeled.empty()) throw ArgumentError("fit requires at least one labeled point");
  const Eigen::MatrixXd K = gram_matrix(labeled.points(), cfg);
  const Eigen::VectorXd& y = labeled.labels();
  const Eigen::Index n = K.rows();

  // Smallest reciprocal condition seen, i.e. that of the least-jittered factorization.
  double rcond = std::numeric_limits<double>::infinity();
  for (double jitter : kJitterLadder) {
    Eigen::MatrixXd Kj = K;
    Kj.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(Kj);
    if (llt.info() != Eigen::Success) continue;
    rcond = std::min(rcond, llt.rcond());
    KernelInterpolator m(cfg);
    m.base_ = labeled;
    m.chol_ = llt.matrixL();
    m.jitter_ = jitter;
    m.solve_coefficients();
    const double residual = n > 0 ? (K * m.alpha_ - y).cwiseAbs().maxCoeff() : 0.0;
    if (std::isfinite(residual) && residual <= kResidualTolerance) return m;
  }
  const double cond = rcond > 0.0 && std::isfinite(rcond) ? 1.0 / rcond
                                                          : std::numeric_limits<double>::infinity();
  throw ConditioningError("kernel matrix is singular beyond the jitter budget (cond ~ " +
                              std::to_string(cond) + ")",
                          cond);
}

inline double evaluate(const KernelInterpolator& m, const PointRef& x) { return m.evaluate(x); }

/// Minimum-norm interpolant of base ∪ {(u, t)} given a_u = k(X, u).
///
/// Appends one row to the cached Cholesky factor; the new diagonal entry is the
/// Schur complement 1 - a_u^T K^{-1} a_u, which must stay above kSchurFloor.
inline KernelInterpolator augmented_fit(const KernelInterpolator& m, const PointRef& u, int t,
                                        const Eigen::VectorXd& a_u) {
  check_label(t);
  m.check_dim(u);
  if (static_cast<std::size_t>(a_u.size()) != m.size())
    throw ArgumentError("kernel column length does not match the labeled set");

  const Eigen::Index n = static_cast<Eigen::Index>(m.size());
  const Eigen::VectorXd l = m.whiten(a_u);
  const double schur = 1.0 + m.jitter_ - l.squaredNorm();
  if (!(schur >= kSchurFloor))
    throw DuplicatePointError("candidate is numerically coincident with the labeled set "
                              "(Schur complement " + std::to_string(schur) + ")");

  KernelInterpolator out(m.config_);
  out.base_ = m.base_;
  out.base_.add(u, t);
  out.jitter_ = m.jitter_;
  out.chol_ = Eigen::MatrixXd::Zero(n + 1, n + 1);
  if (n > 0) {
    out.chol_.topLeftCorner(n, n) = m.chol_;
    out.chol_.block(n, 0, 1, n) = l.transpose();
  }
  out.chol_(n, n) = std::sqrt(schur);
  out.solve_coefficients();
  return out;
}

inline KernelInterpolator augmented_fit(const KernelInterpolator& m, const PointRef& u, int t) {
  return augmented_fit(m, u, t, m.kernel_column(u));
}

/// (1 - t f(u))^2 / (1 - a_u^T K^{-1} a_u): the growth of norm_sq when (u, t) is added.
inline double rank_one_increment(const KernelInterpolator& m, const PointRef& u, int t) {
  check_label(t);
  const Eigen::VectorXd a = m.kernel_column(u);
  const double schur = 1.0 + m.jitter() - m.leverage(a);
  if (!(schur >= kSchurFloor))
    throw DuplicatePointError("candidate is numerically coincident with the labeled set");
  const double f = m.empty() ? 0.0 : m.coefficients().dot(a);
  const double r = 1.0 - t * f;
  return r * r / schur;
}

}  // namespace maximin
