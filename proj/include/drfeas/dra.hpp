#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "drfeas/sets.hpp"

namespace drfeas {

/// One application of T = Id - P_A + P_B R_A.
struct StepRecord {
  std::size_t n = 0;
  Vector x;
  Vector a;  // selected element of P_A x
  Vector r;  // 2a - x
  Vector b;  // selected element of P_B r
  Vector x_next;
  double residual = 0.0;  // ||x_next - x||

  const Vector& shadow() const { return a; }
};

enum class StopReason { Converged, Diverged, MaxIter };

struct IterateOptions {
  std::size_t max_iter = 10000;
  double fix_tol = 1e-11;  // relative: residual <= fix_tol * (1 + ||x_n||)
  double div_threshold = 1e8;
  // Unset: stop on divergence only when B is a finite set or a union.
  std::optional<bool> stop_on_divergence;
};

struct Trace {
  Set A;
  Set B;
  std::vector<StepRecord> steps;
  IterateOptions options;
  StopReason stop_reason = StopReason::MaxIter;

  std::size_t dim() const { return A.dim(); }

  /// x_0, ..., x_N where N = steps.size().
  std::vector<Vector> iterates() const {
    std::vector<Vector> out;
    out.reserve(steps.size() + 1);
    for (const auto& s : steps) out.push_back(s.x);
    if (!steps.empty()) out.push_back(steps.back().x_next);
    return out;
  }
};

inline StepRecord dra_step(const Set& A, const Set& B, const Vector& x, std::size_t n = 0) {
  if (A.dim() != B.dim()) throw InvalidInput("dra_step: A and B have different dimensions");
  StepRecord s;
  s.n = n;
  s.x = x;
  s.a = project(A, x).selected;
  s.r = 2.0 * s.a - x;
  s.b = project(B, s.r).selected;
  s.x_next = (x - s.a) + s.b;
  s.residual = distance(s.x_next, x);
  return s;
}

inline bool divergence_stops(const Set& B, const IterateOptions& opts) {
  if (opts.stop_on_divergence) return *opts.stop_on_divergence;
  return B.get_if<FiniteSet>() != nullptr || B.get_if<DisjointUnion>() != nullptr;
}

inline Trace iterate(const Set& A, const Set& B, const Vector& x0, IterateOptions opts = {}) {
  if (opts.max_iter < 1) throw InvalidInput("iterate: max_iter must be >= 1");
  if (!(opts.fix_tol >= 0.0)) throw InvalidInput("iterate: fix_tol must be >= 0");
  if (!(opts.div_threshold > 0.0)) throw InvalidInput("iterate: div_threshold must be > 0");
  if (x0.dim() != A.dim()) throw InvalidInput("iterate: x0 dimension does not match the sets");
  if (!all_finite(x0)) throw InvalidInput("iterate: x0 must be finite");

  Trace t{A, B, {}, opts, StopReason::MaxIter};
  const bool watch_divergence = divergence_stops(B, opts);
  Vector x = x0;
  for (std::size_t n = 0; n < opts.max_iter; ++n) {
    StepRecord s = dra_step(A, B, x, n);
    const double scale = 1.0 + norm(x);
    const bool fixed = s.residual <= opts.fix_tol * scale;
    x = s.x_next;
    t.steps.push_back(std::move(s));
    if (!all_finite(x)) throw NumericalError("iterate: non-finite iterate");
    if (fixed) {
      t.stop_reason = StopReason::Converged;
      break;
    }
    if (watch_divergence && norm(x) >= opts.div_threshold) {
      t.stop_reason = StopReason::Diverged;
      break;
    }
  }
  return t;
}

/// min over a in P_A x, b in P_B(2a - x) of ||b - a||.
inline double fixed_point_residual(const Set& A, const Set& B, const Vector& x) {
  const ProjectionResult pa = project(A, x);
  double best = std::numeric_limits<double>::infinity();
  for (const Vector& a : pa.all) {
    const ProjectionResult pb = project(B, 2.0 * a - x);
    for (const Vector& b : pb.all) best = std::min(best, distance(a, b));
  }
  return best;
}

}  // namespace drfeas
