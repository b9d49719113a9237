#pragma once

// Closed forms for the 1D Laplace kernel k(x, x') = exp(-|x - x'| / h).
//
// With sorted points and d_i = exp(-(x_{i+1} - x_i) / h), the inverse kernel
// matrix is tridiagonal, which makes the interpolant, its norm and the
// per-interval score maxima available without any dense linear algebra.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "maximin/errors.hpp"
#include "maximin/kernel.hpp"

namespace maximin::laplace {

class SortedLabeled1D {
 public:
  /// Sorts by position. Throws ArgumentError on repeated positions, bad
  /// labels or a non-positive bandwidth.
  SortedLabeled1D(std::span<const double> positions, std::span<const int> labels, double bandwidth)
      : bandwidth_(bandwidth) {
    if (positions.size() != labels.size())
      throw ArgumentError("positions and labels differ in length");
    if (!(bandwidth > 0.0)) throw ArgumentError("bandwidth must be positive");
    std::vector<std::size_t> order(positions.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return positions[a] < positions[b]; });
    for (std::size_t i : order) {
      check_label(labels[i]);
      if (!positions_.empty() && !(positions[i] > positions_.back()))
        throw ArgumentError("positions must be distinct");
      positions_.push_back(positions[i]);
      labels_.push_back(labels[i]);
    }
  }

  std::size_t size() const noexcept { return positions_.size(); }
  double bandwidth() const noexcept { return bandwidth_; }
  const std::vector<double>& positions() const noexcept { return positions_; }
  const std::vector<int>& labels() const noexcept { return labels_; }

  /// d_i for 0 <= i < n-1.
  double gap_factor(std::size_t i) const {
    return std::exp(-(positions_[i + 1] - positions_[i]) / bandwidth_);
  }
  /// 1 - d_i^2, computed without cancellation.
  double one_minus_gap_sq(std::size_t i) const {
    return -std::expm1(-2.0 * (positions_[i + 1] - positions_[i]) / bandwidth_);
  }

  KernelConfig kernel() const { return {bandwidth_, 1.0}; }

 private:
  std::vector<double> positions_;
  std::vector<int> labels_;
  double bandwidth_;
};

struct TridiagonalInverse {
  Eigen::VectorXd diagonal;      // n
  Eigen::VectorXd off_diagonal;  // n - 1, entry (i, i+1)

  Eigen::MatrixXd dense() const {
    const Eigen::Index n = diagonal.size();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    out.diagonal() = diagonal;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      out(i, i + 1) = off_diagonal[i];
      out(i + 1, i) = off_diagonal[i];
    }
    return out;
  }
};

inline TridiagonalInverse tridiagonal_inverse(const SortedLabeled1D& s) {
  const std::size_t n = s.size();
  if (n == 0) throw ArgumentError("need at least one point");
  TridiagonalInverse out;
  out.diagonal = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), -1.0);
  out.off_diagonal.resize(static_cast<Eigen::Index>(n - 1));
  if (n == 1) {
    out.diagonal[0] = 1.0;
    return out;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double inv = 1.0 / s.one_minus_gap_sq(i);
    out.diagonal[static_cast<Eigen::Index>(i)] += inv;
    out.diagonal[static_cast<Eigen::Index>(i + 1)] += inv;
    out.off_diagonal[static_cast<Eigen::Index>(i)] = -s.gap_factor(i) * inv;
  }
  // End rows only see one gap; undo the -1 there.
  out.diagonal[0] += 1.0;
  out.diagonal[static_cast<Eigen::Index>(n - 1)] += 1.0;
  return out;
}

/// 2 / (1 + y_i y_{i+1} d_i), the per-gap term of the norm.
inline double gap_norm_term(const SortedLabeled1D& s, std::size_t i) {
  return 2.0 / (1.0 + s.labels()[i] * s.labels()[i + 1] * s.gap_factor(i));
}

/// y^T K^{-1} y = -(n - 2) + sum_i 2 / (1 + y_i y_{i+1} d_i).
inline double norm_closed_form(const SortedLabeled1D& s) {
  const std::size_t n = s.size();
  if (n == 0) throw ArgumentError("need at least one point");
  double acc = -(static_cast<double>(n) - 2.0);
  for (std::size_t i = 0; i + 1 < n; ++i) acc += gap_norm_term(s, i);
  return acc;
}

/// Interpolant coefficients alpha_i = c_i y_i with
/// c_i = 1/(1 + y_i y_{i-1} d_{i-1}) + 1/(1 + y_i y_{i+1} d_i) - 1, d_0 = d_n = 0.
inline Eigen::VectorXd interpolant_coefficients(const SortedLabeled1D& s) {
  const std::size_t n = s.size();
  Eigen::VectorXd alpha(static_cast<Eigen::Index>(n));
  const auto& y = s.labels();
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? 1.0 / (1.0 + y[i] * y[i - 1] * s.gap_factor(i - 1)) : 1.0;
    const double right = i + 1 < n ? 1.0 / (1.0 + y[i] * y[i + 1] * s.gap_factor(i)) : 1.0;
    alpha[static_cast<Eigen::Index>(i)] = (left + right - 1.0) * y[i];
  }
  return alpha;
}

inline double evaluate_closed_form(const SortedLabeled1D& s, double x) {
  const Eigen::VectorXd alpha = interpolant_coefficients(s);
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    acc += alpha[static_cast<Eigen::Index>(i)] *
           std::exp(-std::abs(x - s.positions()[i]) / s.bandwidth());
  return acc;
}

struct IntervalScoreResult {
  double maximizer = 0.0;
  double max_score = 0.0;
  std::size_t interval = 0;  // 0-based: between positions[j] and positions[j+1]
};

/// Maximum of the function-norm score over (x_j, x_{j+1}); always attained
/// at the midpoint with t = y_j.
inline IntervalScoreResult interval_max_score(const SortedLabeled1D& s, std::size_t j,
                                              double norm_sq) {
  if (j + 1 >= s.size())
    throw ArgumentError("interval index " + std::to_string(j) + " out of range for " +
                        std::to_string(s.size()) + " points");
  const double gap = s.positions()[j + 1] - s.positions()[j];
  const double half = std::exp(-gap / (2.0 * s.bandwidth()));
  const int same = s.labels()[j] * s.labels()[j + 1];
  IntervalScoreResult out;
  out.interval = j;
  out.maximizer = 0.5 * (s.positions()[j] + s.positions()[j + 1]);
  out.max_score = norm_sq - 1.0 - gap_norm_term(s, j) + 2.0 / (1.0 + half) +
                  2.0 / (1.0 + same * half);
  return out;
}

inline IntervalScoreResult interval_max_score(const SortedLabeled1D& s, std::size_t j) {
  return interval_max_score(s, j, norm_closed_form(s));
}

inline std::vector<IntervalScoreResult> all_interval_maxima(const SortedLabeled1D& s) {
  std::vector<IntervalScoreResult> out;
  if (s.size() < 2) return out;
  const double norm_sq = norm_closed_form(s);
  for (std::size_t j = 0; j + 1 < s.size(); ++j) out.push_back(interval_max_score(s, j, norm_sq));
  return out;
}

}  // namespace maximin::laplace
