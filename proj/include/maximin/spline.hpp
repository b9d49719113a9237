#pragma once

// One-dimensional two-layer ReLU networks through their linear-spline form.
//
// The minimum weight-norm network interpolating 1D data is the minimal-knot
// linear spline through the points, and its norm is the total variation of
// f'. Two artificial knots replicating the extreme labels pin f' = 0 outside
// the data so that total variation alone measures the network.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "maximin/errors.hpp"
#include "maximin/kernel.hpp"
#include "maximin/scoring.hpp"

namespace maximin::spline {

class SplineInterpolator {
 public:
  const std::vector<double>& knots() const noexcept { return knots_; }
  const std::vector<int>& values() const noexcept { return values_; }
  /// Slope on (knots[i], knots[i+1]).
  const std::vector<double>& slopes() const noexcept { return slopes_; }
  double weight_norm() const noexcept { return weight_norm_; }
  /// Number of real (non-artificial) knots.
  std::size_t size() const noexcept { return knots_.size() - 2; }
  double lower() const noexcept { return knots_.front(); }
  double upper() const noexcept { return knots_.back(); }

  double evaluate(double x) const {
    if (x <= knots_.front()) return values_.front();
    if (x >= knots_.back()) return values_.back();
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - knots_.begin()) - 1;
    return values_[j] + slopes_[j] * (x - knots_[j]);
  }

  /// j with knots[j] < u < knots[j+1].
  std::size_t interval_of(double u) const {
    if (!(u >= knots_.front() && u <= knots_.back()))
      throw OutOfRangeError("candidate " + std::to_string(u) + " outside knot range [" +
                            std::to_string(knots_.front()) + ", " +
                            std::to_string(knots_.back()) + "]");
    const auto it = std::lower_bound(knots_.begin(), knots_.end(), u);
    if (it != knots_.end() && *it == u)
      throw DuplicatePointError("candidate " + std::to_string(u) + " is already a knot");
    return static_cast<std::size_t>(it - knots_.begin()) - 1;
  }

  /// Weight norm after inserting (u, t) as a knot. Labels are +-1, so
  /// adjacent slopes never share a sign and TV(f') = sum 2(1 - y_i y_{i+1}) / gap_i.
  double weight_norm_with(double u, int t) const {
    check_label(t);
    const std::size_t j = interval_of(u);
    const double xl = knots_[j], xr = knots_[j + 1];
    const double yl = values_[j], yr = values_[j + 1];
    // Beyond the data u becomes the new extreme and the artificial knot
    // follows it, so the outer side adds nothing.
    const double left = j == 0 ? 0.0 : 2.0 * (1.0 - t * yl) / (u - xl);
    const double right = j + 2 == knots_.size() ? 0.0 : 2.0 * (1.0 - t * yr) / (xr - u);
    return weight_norm_ + left + right - 2.0 * (1.0 - yl * yr) / (xr - xl);
  }

 private:
  friend SplineInterpolator fit_spline(std::span<const double>, std::span<const int>);

  std::vector<double> knots_;
  std::vector<int> values_;
  std::vector<double> slopes_;
  double weight_norm_ = 0.0;
};

/// Offset of the artificial boundary knots from the extreme data points.
inline double boundary_offset(double span) { return std::max(1.0, span); }

inline SplineInterpolator fit_spline(std::span<const double> positions, std::span<const int> labels) {
  if (positions.size() != labels.size())
    throw ArgumentError("positions and labels differ in length");
  if (positions.empty()) throw ArgumentError("spline fit needs at least one labeled point");
  std::vector<std::size_t> order(positions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return positions[a] < positions[b]; });

  SplineInterpolator m;
  m.knots_.reserve(positions.size() + 2);
  m.values_.reserve(positions.size() + 2);
  m.knots_.push_back(0.0);
  m.values_.push_back(0);
  for (std::size_t i : order) {
    check_label(labels[i]);
    if (!std::isfinite(positions[i])) throw ArgumentError("non-finite position");
    if (m.knots_.size() > 1 && !(positions[i] > m.knots_.back()))
      throw ArgumentError("duplicate spline position " + std::to_string(positions[i]));
    m.knots_.push_back(positions[i]);
    m.values_.push_back(labels[i]);
  }
  const double lo = m.knots_[1], hi = m.knots_.back();
  const double offset = boundary_offset(hi - lo);
  m.knots_.front() = lo - offset;
  m.values_.front() = m.values_[1];
  m.knots_.push_back(hi + offset);
  m.values_.push_back(m.values_.back());

  m.slopes_.resize(m.knots_.size() - 1);
  for (std::size_t i = 0; i + 1 < m.knots_.size(); ++i)
    m.slopes_[i] = (m.values_[i + 1] - m.values_[i]) / (m.knots_[i + 1] - m.knots_[i]);
  // Total variation of f', with f' = 0 beyond the artificial knots.
  double prev = 0.0;
  for (double s : m.slopes_) {
    m.weight_norm_ += std::abs(s - prev);
    prev = s;
  }
  m.weight_norm_ += std::abs(prev);
  return m;
}

/// The spline refit with (u, t) added.
inline SplineInterpolator augmented(const SplineInterpolator& m, double u, int t) {
  m.interval_of(u);
  std::vector<double> xs(m.knots().begin() + 1, m.knots().end() - 1);
  std::vector<int> ys(m.values().begin() + 1, m.values().end() - 1);
  xs.push_back(u);
  ys.push_back(t);
  return fit_spline(xs, ys);
}

/// Estimated label: the t with the smaller updated weight norm, +1 on ties.
inline int estimate_label(const SplineInterpolator& m, double u) {
  return m.weight_norm_with(u, 1) <= m.weight_norm_with(u, -1) ? 1 : -1;
}

inline ScoredCandidate spline_score_function_norm(const SplineInterpolator& m, double u,
                                                  std::size_t index = 0) {
  const double plus = m.weight_norm_with(u, 1);
  const double minus = m.weight_norm_with(u, -1);
  return plus <= minus ? ScoredCandidate{index, 1, plus} : ScoredCandidate{index, -1, minus};
}

struct UniformDensity {
  double lower = 0.0;
  double upper = 1.0;
};

struct EmpiricalDensity {
  std::vector<double> points;  // kept sorted
};

/// P_X for the data-based norm in 1D.
class Density1D {
 public:
  static Density1D uniform(double lower, double upper) {
    if (!(upper > lower)) throw ArgumentError("uniform density needs a positive-length interval");
    return Density1D(UniformDensity{lower, upper});
  }
  static Density1D empirical(std::vector<double> points) {
    if (points.empty()) throw ArgumentError("empirical density needs a nonempty pool");
    std::sort(points.begin(), points.end());
    return Density1D(EmpiricalDensity{std::move(points)});
  }

  const std::variant<UniformDensity, EmpiricalDensity>& value() const noexcept { return value_; }

 private:
  explicit Density1D(std::variant<UniformDensity, EmpiricalDensity> v) : value_(std::move(v)) {}
  std::variant<UniformDensity, EmpiricalDensity> value_;
};

namespace detail {

/// Integral of g^2 over [a, b] for g linear with g(a) = ga, g(b) = gb.
inline double linear_sq_integral(double a, double b, double ga, double gb) {
  return (b - a) * (ga * ga + ga * gb + gb * gb) / 3.0;
}

/// Integral over [l, r] ∩ [lo, hi] of the square of the segment from (l, gl) to (r, gr).
inline double clipped_segment(double l, double r, double gl, double gr, double lo, double hi) {
  const double a = std::max(l, lo), b = std::min(r, hi);
  if (!(b > a)) return 0.0;
  const double slope = (gr - gl) / (r - l);
  return linear_sq_integral(a, b, gl + slope * (a - l), gl + slope * (b - l));
}

}  // namespace detail

/// Expected (f^u - f)^2 under the density. f^u - f is a hat supported on the
/// enclosing knot interval with peak t - f(u) at u; t follows the function-norm rule.
inline ScoredCandidate spline_score_data_norm(const SplineInterpolator& m, double u,
                                              const Density1D& density, std::size_t index = 0) {
  const std::size_t j = m.interval_of(u);
  const int t = estimate_label(m, u);
  const double xl = m.knots()[j], xr = m.knots()[j + 1];
  const double peak = t - m.evaluate(u);
  double score = 0.0;
  if (peak != 0.0) {
    if (const auto* uni = std::get_if<UniformDensity>(&density.value())) {
      score = (detail::clipped_segment(xl, u, 0.0, peak, uni->lower, uni->upper) +
               detail::clipped_segment(u, xr, peak, 0.0, uni->lower, uni->upper)) /
              (uni->upper - uni->lower);
    } else {
      const auto& pts = std::get<EmpiricalDensity>(density.value()).points;
      auto it = std::upper_bound(pts.begin(), pts.end(), xl);
      const auto end = std::lower_bound(pts.begin(), pts.end(), xr);
      double acc = 0.0;
      for (; it != end; ++it) {
        const double x = *it;
        const double g = x <= u ? peak * (x - xl) / (u - xl) : peak * (xr - x) / (xr - u);
        acc += g * g;
      }
      score = acc / static_cast<double>(pts.size());
    }
  }
  return {index, t, score};
}

/// Scores every candidate and returns a seeded-tie-broken maximizer.
inline std::vector<ScoredCandidate> spline_score_pool(const SplineInterpolator& m,
                                                      std::span<const double> candidates,
                                                      ScoreKind kind, const Density1D& density) {
  std::vector<ScoredCandidate> out(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i)
    out[i] = kind == ScoreKind::FunctionNorm
                 ? spline_score_function_norm(m, candidates[i], i)
                 : spline_score_data_norm(m, candidates[i], density, i);
  return out;
}

inline ScoredCandidate spline_select_next(const SplineInterpolator& m,
                                          std::span<const double> candidates, ScoreKind kind,
                                          const Density1D& density, std::uint64_t seed) {
  if (candidates.empty()) throw EmptyPoolError("cannot select from an empty pool");
  return select_from(spline_score_pool(m, candidates, kind, density), seed);
}

}  // namespace maximin::spline
