#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "drfeas/dra.hpp"

namespace drfeas {

// ---------------------------------------------------------------------------
// Friedrichs angle
// ---------------------------------------------------------------------------

/// Singular values at or above this are directions in U ∩ V.
inline constexpr double kIntersectionCutoff = 1.0 - 1e-9;

/// Cosine of the Friedrichs angle between span(U) and span(V); 0 when no
/// principal angle remains after removing the intersection.
inline double friedrichs_cosine(const std::vector<Vector>& U, const std::vector<Vector>& V) {
  if (U.empty() || V.empty()) return 0.0;
  const std::size_t n = U.front().dim();
  for (const auto& v : V)
    if (v.dim() != n) throw InvalidInput("friedrichs_cosine: spans have different dimensions");
  const auto qu = orthonormal_basis(U);
  const auto qv = orthonormal_basis(V);
  if (qu.empty() || qv.empty()) return 0.0;
  Matrix m(qu.size(), qv.size());
  for (std::size_t i = 0; i < qu.size(); ++i)
    for (std::size_t j = 0; j < qv.size(); ++j) m(i, j) = dot(qu[i], qv[j]);
  double best = 0.0;
  for (double s : svd(m).singular)
    if (s < kIntersectionCutoff) best = std::max(best, s);
  return best;
}

// ---------------------------------------------------------------------------
// Linear rate
// ---------------------------------------------------------------------------

struct RateFit {
  double rate = 0.0;
  double r_squared = 0.0;
  std::size_t first = 0;  // step indices of the window, inclusive
  std::size_t last = 0;
};

/// Least squares fit of log r_n = c + n log q over the given points.
/// Residuals below `floor[k]` are skipped.
inline RateFit fit_log_linear(std::span<const double> residuals, std::size_t first_index,
                              std::span<const double> floors = {}) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < residuals.size(); ++k) {
    const double f = floors.empty() ? 0.0 : floors[k];
    if (residuals[k] > 0.0 && residuals[k] > f && std::isfinite(residuals[k]))
      pts.emplace_back(static_cast<double>(first_index + k), std::log(residuals[k]));
  }
  if (pts.size() < 3) throw FitError("rate fit: fewer than 3 residuals above the rounding floor");

  double mx = 0.0, my = 0.0;
  for (auto [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (auto [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  const double slope = sxy / sxx;
  double ss_res = 0.0;
  for (auto [x, y] : pts) {
    const double e = y - (my + slope * (x - mx));
    ss_res += e * e;
  }

  RateFit fit;
  fit.rate = std::exp(slope);
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.first = static_cast<std::size_t>(pts.front().first);
  fit.last = static_cast<std::size_t>(pts.back().first);
  if (!(fit.rate < 1.0)) throw FitError("rate fit: residuals do not decay");
  return fit;
}

/// Fit over the final `window` steps of the trace.
inline RateFit estimate_linear_rate(const Trace& trace, std::size_t window) {
  if (window < 3) throw InvalidInput("estimate_linear_rate: window must be >= 3");
  if (trace.steps.size() < window) throw FitError("estimate_linear_rate: trace shorter than window");
  const std::size_t first = trace.steps.size() - window;
  std::vector<double> res, floors;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t k = first; k < trace.steps.size(); ++k) {
    res.push_back(trace.steps[k].residual);
    floors.push_back(100.0 * eps * (1.0 + norm(trace.steps[k].x)));
  }
  return fit_log_linear(res, first, floors);
}

// ---------------------------------------------------------------------------
// Cycles and regularity
// ---------------------------------------------------------------------------

struct CycleInfo {
  std::size_t period = 0;
  std::vector<Vector> points;
};

/// Smallest k <= max_period with ||x_{n+k} - x_n|| <= tol for every n in
/// the last 4k iterates. The returned points start at the last iterate whose
/// index is a multiple of k, so they follow the phase of x_0.
inline std::optional<CycleInfo> detect_cycle(const std::vector<Vector>& xs, std::size_t max_period,
                                             double tol) {
  if (xs.empty()) return std::nullopt;
  const std::size_t N = xs.size() - 1;
  for (std::size_t k = 1; k <= max_period; ++k) {
    if (N < 4 * k) break;
    bool ok = true;
    for (std::size_t n = N - 4 * k; n + k <= N && ok; ++n) ok = distance(xs[n + k], xs[n]) <= tol;
    if (!ok) continue;
    std::size_t s = ((N + 1 - k) / k) * k;
    CycleInfo c{k, {}};
    for (std::size_t i = 0; i < k; ++i) c.points.push_back(xs[s + i]);
    return c;
  }
  return std::nullopt;
}

inline std::optional<CycleInfo> detect_cycle(const Trace& trace, std::size_t max_period,
                                             double tol) {
  return detect_cycle(trace.iterates(), max_period, tol);
}

/// Largest residual among the final `tail` steps.
inline double asymptotic_regularity(const Trace& trace, std::size_t tail = 1) {
  if (trace.steps.empty()) throw InvalidInput("asymptotic_regularity: empty trace");
  tail = std::clamp<std::size_t>(tail, 1, trace.steps.size());
  double m = 0.0;
  for (std::size_t k = trace.steps.size() - tail; k < trace.steps.size(); ++k)
    m = std::max(m, trace.steps[k].residual);
  return m;
}

// ---------------------------------------------------------------------------
// Iteration bounds for a line against a ray or a cone in the plane
// ---------------------------------------------------------------------------

enum class BoundKind { LineRay, LineCone };

struct BoundSpec {
  BoundKind kind = BoundKind::LineRay;
  double theta1 = 0.0;  // the ray angle for LineRay
  double theta2 = 0.0;
  long N = 3;
};

namespace detail {
// floor of a ratio that is mathematically rational; absorbs rounding in pi/theta
inline long floor_ratio(double q) { return static_cast<long>(std::floor(q + 1e-9)); }
}  // namespace detail

inline BoundSpec theoretical_bound(BoundKind kind, double theta1, double theta2 = 0.0) {
  constexpr double pi = std::numbers::pi;
  BoundSpec b{kind, theta1, theta2, 3};
  if (kind == BoundKind::LineRay) {
    if (!(theta1 > 0.0 && theta1 <= pi)) throw InvalidInput("line-ray bound: theta must lie in (0, pi]");
    if (theta1 <= pi / 2)
      b.N = detail::floor_ratio(pi / theta1) + 3;
    else if (theta1 < pi)
      b.N = detail::floor_ratio(pi / (pi - theta1)) + 3;
    else
      b.N = 3;  // the ray lies inside the line: one step suffices
    return b;
  }
  if (!(theta1 > 0.0 && theta1 < theta2))
    throw InvalidInput("line-cone bound: need 0 < theta1 < theta2");
  if (theta1 < pi / 2 && pi / 2 < theta2) {
    if (!(theta2 < pi)) throw InvalidInput("line-cone bound: theta2 must be < pi");
    b.N = std::max(detail::floor_ratio(pi / (2 * theta1)),
                   detail::floor_ratio(pi / (2 * (pi - theta2)))) +
          3;
  } else if (theta2 <= pi / 2) {
    b.N = detail::floor_ratio(pi / (2 * theta1)) + detail::floor_ratio(pi / (2 * theta2)) + 5;
  } else {
    throw InvalidInput("line-cone bound: need theta1 < pi/2 < theta2 or theta2 <= pi/2");
  }
  return b;
}

}  // namespace drfeas
