#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "drfeas/analysis.hpp"
#include "drfeas/dra.hpp"

namespace drfeas {

enum class Status { FiniteConvergence, LinearConvergence, Cycle, Divergent, BudgetExhausted };

/// Stable lower-case names used in summaries.
inline std::string to_string(Status s) {
  switch (s) {
    case Status::FiniteConvergence: return "finite";
    case Status::LinearConvergence: return "linear";
    case Status::Cycle: return "cycle";
    case Status::Divergent: return "divergent";
    case Status::BudgetExhausted: return "budget_exhausted";
  }
  return "unknown";
}

inline Status status_from_string(const std::string& s) {
  for (Status v : {Status::FiniteConvergence, Status::LinearConvergence, Status::Cycle,
                   Status::Divergent, Status::BudgetExhausted})
    if (to_string(v) == s) return v;
  throw InvalidInput("unknown status '" + s + "'");
}

struct BestApprox {
  Vector a;
  Vector b;
  double gap = 0.0;
};

struct ConvergenceReport {
  Status status = Status::BudgetExhausted;
  std::size_t n_stop = 0;
  std::optional<Vector> limit;
  std::optional<Vector> shadow_limit;
  std::optional<double> rate;
  std::optional<double> rate_r_squared;
  std::optional<std::size_t> cycle_period;
  std::optional<std::vector<Vector>> cycle_points;
  std::optional<BestApprox> best_approx;
  bool limit_in_intersection = false;
  bool shadow_in_intersection = false;
};

struct ClassifyOptions {
  std::size_t cycle_max_period = 8;
  double cycle_tol = 1e-9;
  std::size_t rate_window = 20;
  double membership_tol = 1e-8;
};

namespace detail {

inline bool in_both(const Trace& t, const Vector& x, double tol) {
  const Tolerance m{tol, 0.0};
  return membership(t.A, x, m) && membership(t.B, x, m);
}

// Each cycle point must map to the next one under a single step.
inline bool cycle_maps_onto_itself(const Trace& t, const std::vector<Vector>& pts, double tol) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vector next = dra_step(t.A, t.B, pts[i]).x_next;
    if (distance(next, pts[(i + 1) % pts.size()]) > tol) return false;
  }
  return true;
}

inline void record_limit(const Trace& t, ConvergenceReport& r, double tol) {
  const Vector& x = t.steps.back().x_next;
  r.limit = x;
  r.shadow_limit = project(t.A, x).selected;
  r.limit_in_intersection = in_both(t, *r.limit, tol);
  r.shadow_in_intersection = in_both(t, *r.shadow_limit, tol);
}

}  // namespace detail

/// Precedence: Cycle > Divergent > FiniteConvergence > LinearConvergence >
/// BudgetExhausted.
inline ConvergenceReport classify(const Trace& t, const ClassifyOptions& opts = {}) {
  if (t.steps.empty()) throw InvalidInput("classify: empty trace");
  ConvergenceReport r;
  r.n_stop = t.steps.size() - 1;

  // A period-1 repetition is a fixed point, not a cycle; a cycle only shows
  // when the budget runs out without the residual vanishing.
  if (t.stop_reason == StopReason::MaxIter) {
    if (auto c = detect_cycle(t, opts.cycle_max_period, opts.cycle_tol);
        c && c->period >= 2 && detail::cycle_maps_onto_itself(t, c->points, opts.cycle_tol)) {
      r.status = Status::Cycle;
      r.cycle_period = c->period;
      r.cycle_points = std::move(c->points);
      return r;
    }
  }

  if (t.stop_reason == StopReason::Diverged) {
    r.status = Status::Divergent;
    const Vector& a = t.steps.back().a;
    Vector b = project(t.B, a).selected;
    const double gap = distance(a, b);
    r.best_approx = BestApprox{a, std::move(b), gap};
    return r;
  }

  if (t.stop_reason == StopReason::Converged) {
    const std::size_t k = t.steps.size() - 1;
    const bool jump = k == 0 || t.steps[k - 1].residual > std::sqrt(t.options.fix_tol);
    if (jump) {
      r.status = Status::FiniteConvergence;
      r.n_stop = k;
      detail::record_limit(t, r, opts.membership_tol);
      return r;
    }
  }

  try {
    const RateFit fit = estimate_linear_rate(t, opts.rate_window);
    if (fit.r_squared >= 0.999) {
      r.status = Status::LinearConvergence;
      r.rate = fit.rate;
      r.rate_r_squared = fit.r_squared;
      detail::record_limit(t, r, opts.membership_tol);
      return r;
    }
  } catch (const FitError&) {
  }

  r.status = Status::BudgetExhausted;
  return r;
}

}  // namespace drfeas
