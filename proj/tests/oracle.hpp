#pragma once

// Reference computations for the tests. Deliberately naive and independent of
// the library: plain vectors, Gauss-Jordan elimination, brute-force sums.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // row-major
using Points = std::vector<Vec>;

inline double distance(const Vec& a, const Vec& b, double p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::pow(std::abs(a[i] - b[i]), p);
  return std::pow(acc, 1.0 / p);
}

inline double kernel(const Vec& a, const Vec& b, double h, double p) {
  return std::exp(-distance(a, b, p) / h);
}

inline Mat gram(const Points& xs, double h, double p) {
  Mat k(xs.size(), Vec(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) k[i][j] = kernel(xs[i], xs[j], h, p);
  return k;
}

/// Solves A x = b by Gauss-Jordan elimination with partial pivoting.
inline Vec solve(Mat a, Vec b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) throw std::runtime_error("singular");
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

inline Mat inverse(const Mat& a) {
  const std::size_t n = a.size();
  Mat out(n, Vec(n));
  for (std::size_t c = 0; c < n; ++c) {
    Vec e(n, 0.0);
    e[c] = 1.0;
    const Vec col = solve(a, e);
    for (std::size_t r = 0; r < n; ++r) out[r][c] = col[r];
  }
  return out;
}

inline double dot(const Vec& a, const Vec& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

/// Minimum-norm interpolant by direct solve: coefficients and squared norm.
struct Interp {
  Points xs;
  Vec alpha;
  double norm_sq = 0.0;
  double h = 1.0, p = 1.0;

  double operator()(const Vec& x) const {
    double f = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) f += alpha[i] * kernel(xs[i], x, h, p);
    return f;
  }
};

inline Interp interpolate(const Points& xs, const Vec& ys, double h, double p) {
  Interp out;
  out.xs = xs;
  out.h = h;
  out.p = p;
  if (xs.empty()) return out;
  out.alpha = solve(gram(xs, h, p), ys);
  out.norm_sq = dot(ys, out.alpha);
  return out;
}

/// Function-norm score by two explicit refits.
inline std::pair<double, int> refit_score(const Points& xs, const Vec& ys, const Vec& u, double h,
                                          double p) {
  Points ax = xs;
  ax.push_back(u);
  Vec yp = ys, ym = ys;
  yp.push_back(1.0);
  ym.push_back(-1.0);
  const double np = interpolate(ax, yp, h, p).norm_sq;
  const double nm = interpolate(ax, ym, h, p).norm_sq;
  return np <= nm ? std::pair{np, 1} : std::pair{nm, -1};
}

/// Data-norm score by explicit refit with t = sign(f(u)), averaged over `pool`.
inline double refit_data_score(const Points& xs, const Vec& ys, const Vec& u, const Points& pool,
                               double h, double p) {
  const Interp f = interpolate(xs, ys, h, p);
  const double t = f(u) >= 0.0 ? 1.0 : -1.0;
  Points ax = xs;
  ax.push_back(u);
  Vec ay = ys;
  ay.push_back(t);
  const Interp g = interpolate(ax, ay, h, p);
  double acc = 0.0;
  for (const auto& x : pool) {
    const double d = g(x) - f(x);
    acc += d * d;
  }
  return acc / static_cast<double>(pool.size());
}

// --- 1D linear splines ------------------------------------------------------

/// Piecewise-linear interpolation of the sorted (x, y) table, flat outside.
inline double pwl(const Vec& x, const Vec& y, double u) {
  if (u <= x.front()) return y.front();
  if (u >= x.back()) return y.back();
  const auto j = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), u) - x.begin()) - 1;
  const double w = (u - x[j]) / (x[j + 1] - x[j]);
  return (1.0 - w) * y[j] + w * y[j + 1];
}

/// Total variation of the derivative of the flat-extended interpolant.
inline double slope_variation(Vec x, Vec y) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  Vec sx, sy;
  for (auto i : idx) {
    sx.push_back(x[i]);
    sy.push_back(y[i]);
  }
  Vec slopes = {0.0};
  for (std::size_t i = 0; i + 1 < sx.size(); ++i)
    slopes.push_back((sy[i + 1] - sy[i]) / (sx[i + 1] - sx[i]));
  slopes.push_back(0.0);
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < slopes.size(); ++i) tv += std::abs(slopes[i + 1] - slopes[i]);
  return tv;
}

/// Composite Simpson rule on [a, b] with n (even) panels.
template <typename F>
double simpson(F f, double a, double b, std::size_t n = 20000) {
  const double step = (b - a) / static_cast<double>(n);
  double acc = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * f(a + step * static_cast<double>(i));
  return acc * step / 3.0;
}

/// Upper-tail p-value of a chi-square statistic, via the regularized gamma series.
inline double chi_square_sf(double stat, double dof) {
  const double a = dof / 2.0, x = stat / 2.0;
  if (x <= 0.0) return 1.0;
  // P(a, x) by series when x < a + 1, else Q(a, x) by continued fraction.
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    double sum = 1.0 / a, term = sum;
    for (int n = 1; n < 10000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (term < sum * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
  }
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, hh = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    hh *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - lg) * hh;
}

}  // namespace oracle
