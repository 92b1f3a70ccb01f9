#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "drfeas/classify.hpp"

namespace drfeas {

using Overrides = std::map<std::string, std::string>;

struct Expectation {
  Status status = Status::FiniteConvergence;
  std::optional<Vector> limit;
  std::optional<Vector> shadow_limit;
  std::optional<double> rate;
  std::optional<std::size_t> cycle_period;
  std::optional<std::vector<Vector>> cycle_points;
  std::optional<std::size_t> max_steps_to_converge;
  std::optional<double> best_approx_gap;
  bool shadow_in_intersection = false;
};

/// Axis-aligned box for seeded start sampling.
struct Box {
  Vector lo;
  Vector hi;
};

struct Problem {
  std::string name;
  Set A;
  Set B;
  Vector x0;
  IterateOptions iterate;
  ClassifyOptions classify;
  Expectation expect;
  std::optional<Box> start_box;
};

struct ScenarioInfo {
  std::string name;
  std::string description;
  std::vector<std::string> params;  // accepted override keys besides x0
};

// Tolerances used when comparing a report against an expectation.
inline constexpr double kLimitTol = 1e-6;
inline constexpr double kRateTol = 0.01;
inline constexpr double kCyclePointTol = 1e-9;
inline constexpr double kGapTol = 1e-9;

const std::vector<ScenarioInfo>& scenario_registry();
std::vector<std::string> list_scenarios();
Problem build(const std::string& name, const Overrides& overrides = {});

struct FieldCheck {
  std::string field;
  std::string expected;
  std::string actual;
  bool ok = false;
};

struct Verdict {
  std::vector<FieldCheck> checks;
  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const FieldCheck& c) { return c.ok; });
  }
};

Verdict check(const Expectation& e, const ConvergenceReport& r);

struct RunOptions {
  std::optional<std::size_t> max_iter;
  std::optional<double> fix_tol;
};

struct RunResult {
  Problem problem;
  Trace trace;
  ConvergenceReport report;
  Verdict verdict;
};

RunResult run(Problem p, const RunOptions& opts = {});
RunResult run(const std::string& name, const Overrides& overrides = {},
              const RunOptions& opts = {});

/// `count` points uniform on the box, reproducible for a given seed.
std::vector<Vector> sample_starts(const Box& box, std::size_t count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Implementation
// ---------------------------------------------------------------------------

namespace detail {

inline double parse_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v))
    throw InvalidInput("override " + key + ": '" + text + "' is not a finite number");
  return v;
}

inline Vector parse_point(const std::string& key, const std::string& text) {
  std::vector<double> c;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) c.push_back(parse_real(key, item));
  if (c.empty()) throw InvalidInput("override " + key + ": empty coordinate list");
  return Vector(std::move(c));
}

// Reads declared overrides and rejects anything else.
class OverrideReader {
 public:
  OverrideReader(const std::string& scenario, const Overrides& o, std::vector<std::string> keys)
      : scenario_(scenario), o_(o), keys_(std::move(keys)) {
    keys_.push_back("x0");
    for (const auto& [k, v] : o_)
      if (std::find(keys_.begin(), keys_.end(), k) == keys_.end())
        throw InvalidInput("scenario " + scenario_ + " has no parameter '" + k + "'");
  }

  double real(const std::string& key, double fallback) const {
    auto it = o_.find(key);
    return it == o_.end() ? fallback : parse_real(key, it->second);
  }

  bool flag(const std::string& key) const {
    auto it = o_.find(key);
    if (it == o_.end()) return false;
    if (it->second == "1" || it->second == "true") return true;
    if (it->second == "0" || it->second == "false") return false;
    throw InvalidInput("override " + key + ": expected true or false");
  }

  Vector start(Vector fallback) const {
    auto it = o_.find("x0");
    if (it == o_.end()) return fallback;
    Vector x = parse_point("x0", it->second);
    if (x.dim() != fallback.dim())
      throw InvalidInput("override x0: scenario " + scenario_ + " needs " +
                         std::to_string(fallback.dim()) + " coordinates");
    return x;
  }

 private:
  std::string scenario_;
  const Overrides& o_;
  std::vector<std::string> keys_;
};

inline Set x_axis() { return Set::hyperplane({0.0, 1.0}, 0.0); }
inline Set slope_epigraph() { return Set::epigraph(ConvexFn::linear({1.0}, -1.0), 1); }
inline Box square_box(double h) { return Box{{-h, -h}, {h, h}}; }

inline Expectation converges_finitely() {
  Expectation e;
  e.status = Status::FiniteConvergence;
  e.shadow_in_intersection = true;
  return e;
}

inline Problem make(std::string name, Set A, Set B, Vector x0, Expectation e) {
  return Problem{std::move(name), std::move(A), std::move(B), std::move(x0), {}, {}, std::move(e),
                 std::nullopt};
}

using Builder = std::function<Problem(const Overrides&)>;

struct Entry {
  ScenarioInfo info;
  Builder build;
};

inline const std::vector<Entry>& entries() {
  constexpr double pi = std::numbers::pi;
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;

    t.push_back({{"hyperplane_epigraph",
                  "line X x {0} against the epigraph of x - 1; finite convergence", {}},
                 [](const Overrides& o) {
                   OverrideReader r("hyperplane_epigraph", o, {});
                   Problem p = make("hyperplane_epigraph", x_axis(), slope_epigraph(),
                                    r.start({2.0, -3.0}), converges_finitely());
                   p.start_box = square_box(10.0);
                   return p;
                 }});

    t.push_back({{"halfspace_epigraph_plus",
                  "upper halfplane X x R+ against the epigraph of x - 1; at most two steps", {}},
                 [](const Overrides& o) {
                   OverrideReader r("halfspace_epigraph_plus", o, {});
                   Expectation e = converges_finitely();
                   e.max_steps_to_converge = 2;
                   Problem p = make("halfspace_epigraph_plus", Set::halfspace({0.0, -1.0}, 0.0),
                                    slope_epigraph(), r.start({2.0, -3.0}), e);
                   p.start_box = square_box(10.0);
                   return p;
                 }});

    t.push_back({{"halfspace_epigraph_minus",
                  "lower halfplane X x R- against the epigraph of x - 1; finite convergence", {}},
                 [](const Overrides& o) {
                   OverrideReader r("halfspace_epigraph_minus", o, {});
                   Problem p = make("halfspace_epigraph_minus", Set::halfspace({0.0, 1.0}, 0.0),
                                    slope_epigraph(), r.start({2.0, 3.0}), converges_finitely());
                   p.start_box = square_box(10.0);
                   return p;
                 }});

    t.push_back({{"no_slater_epigraph",
                  "line X x {0} against the epigraph of x^2; no interior point, no finite "
                  "convergence",
                  {}},
                 [](const Overrides& o) {
                   OverrideReader r("no_slater_epigraph", o, {});
                   Expectation e;
                   e.status = Status::LinearConvergence;
                   e.shadow_limit = Vector{0.0, 0.0};
                   e.shadow_in_intersection = true;
                   return make("no_slater_epigraph", x_axis(),
                               Set::epigraph(ConvexFn::quadratic(), 1), r.start({1.0, 1.0}), e);
                 }});

    t.push_back({{"halfspace_halfspace",
                  "line X x {0} against the halfplane x + rho <= 1; finite convergence", {}},
                 [](const Overrides& o) {
                   OverrideReader r("halfspace_halfspace", o, {});
                   Problem p = make("halfspace_halfspace", x_axis(),
                                    Set::halfspace({1.0, 1.0}, 1.0), r.start({3.0, 2.0}),
                                    converges_finitely());
                   p.start_box = square_box(10.0);
                   return p;
                 }});

    t.push_back({{"hyperplane_ball",
                  "line X x {0} against the unit ball centred at (0, theta); finite convergence",
                  {"theta", "radius"}},
                 [](const Overrides& o) {
                   OverrideReader r("hyperplane_ball", o, {"theta", "radius"});
                   const double theta = r.real("theta", 0.5);
                   const double radius = r.real("radius", 1.0);
                   if (!(std::abs(theta) < radius))
                     throw InvalidInput("hyperplane_ball: need |theta| < radius");
                   Problem p = make("hyperplane_ball", x_axis(), Set::ball({0.0, theta}, radius),
                                    r.start({2.0, 3.0}), converges_finitely());
                   p.start_box = square_box(10.0);
                   return p;
                 }});

    t.push_back({{"hyperplane_ball_intersection",
                  "line X x {0} against the lens of two unit balls; finite convergence", {}},
                 [](const Overrides& o) {
                   OverrideReader r("hyperplane_ball_intersection", o, {});
                   Problem p = make(
                       "hyperplane_ball_intersection", x_axis(),
                       Set::ball_intersection({Ball{{0.0, 0.5}, 1.0}, Ball{{0.5, 0.0}, 1.0}}),
                       r.start({2.0, 3.0}), converges_finitely());
                   p.start_box = square_box(10.0);
                   return p;
                 }});

    t.push_back({{"union_of_balls",
                  "line X x {0} against two disjoint unit balls; finite convergence", {}},
                 [](const Overrides& o) {
                   OverrideReader r("union_of_balls", o, {});
                   Set B = Set::disjoint_union(
                       {Set::ball({-3.0, 0.5}, 1.0), Set::ball({3.0, 0.5}, 1.0)});
                   return make("union_of_balls", x_axis(), std::move(B), r.start({2.0, 2.0}),
                               converges_finitely());
                 }});

    t.push_back({{"finite_set_two_cycle",
                  "line X x {0} against three points; the iteration cycles between two points",
                  {}},
                 [](const Overrides& o) {
                   OverrideReader r("finite_set_two_cycle", o, {});
                   Expectation e;
                   e.status = Status::Cycle;
                   e.cycle_period = 2;
                   if (!o.count("x0"))
                     e.cycle_points = std::vector<Vector>{{0.0, -1.0}, {1.0, 1.0}};
                   Problem p = make("finite_set_two_cycle", x_axis(),
                                    Set::finite({{0.0, -2.0}, {1.0, 2.0}, {-2.0, 0.0}}),
                                    r.start({0.0, -1.0}), e);
                   p.iterate.max_iter = 200;
                   return p;
                 }});

    t.push_back({{"finite_set_four_cycle",
                  "lower halfplane against four points; the iteration cycles between four points",
                  {}},
                 [](const Overrides& o) {
                   OverrideReader r("finite_set_four_cycle", o, {});
                   Expectation e;
                   e.status = Status::Cycle;
                   e.cycle_period = 4;
                   if (!o.count("x0"))
                     e.cycle_points =
                         std::vector<Vector>{{2.0, 17.0}, {20.0, -3.0}, {8.0, 7.0}, {2.0, 12.0}};
                   Problem p = make(
                       "finite_set_four_cycle", Set::halfspace({0.0, 1.0}, 0.0),
                       Set::finite({{2.0, 5.0}, {20.0, -20.0}, {8.0, 7.0}, {-20.0, 0.0}}),
                       r.start({2.0, 17.0}), e);
                   p.iterate.max_iter = 200;
                   return p;
                 }});

    t.push_back({{"finite_set_divergent",
                  "line X x {0} against {(0,1), (1,2)} from (start, -1), start > 1; iterates "
                  "(0, n) run off while the shadow stays at the origin",
                  {"start"}},
                 [](const Overrides& o) {
                   OverrideReader r("finite_set_divergent", o, {"start"});
                   if (o.count("x0") && o.count("start"))
                     throw InvalidInput("finite_set_divergent: give either x0 or start");
                   const double s = r.real("start", 2.0);
                   if (!(s > 1.0)) throw InvalidInput("finite_set_divergent: start must be > 1");
                   Expectation e;
                   e.status = Status::Divergent;
                   e.best_approx_gap = 1.0;
                   Problem p = make("finite_set_divergent", x_axis(),
                                    Set::finite({{0.0, 1.0}, {1.0, 2.0}}), r.start({s, -1.0}), e);
                   p.iterate.div_threshold = 1e3;
                   return p;
                 }});

    t.push_back({{"line_ray",
                  "line X x {0} against the ray at angle theta; finite within the angle bound",
                  {"theta"}},
                 [pi](const Overrides& o) {
                   OverrideReader r("line_ray", o, {"theta"});
                   const double theta = r.real("theta", pi / 6);
                   Expectation e = converges_finitely();
                   e.max_steps_to_converge = static_cast<std::size_t>(
                       theoretical_bound(BoundKind::LineRay, theta).N);
                   Problem p = make("line_ray", x_axis(), Set::ray2d(theta), r.start({1.0, 1.0}), e);
                   p.start_box = square_box(10.0);
                   return p;
                 }});

    t.push_back({{"line_cone",
                  "line X x {0} against the cone between theta1 and theta2; finite within the "
                  "angle bound",
                  {"theta1", "theta2"}},
                 [pi](const Overrides& o) {
                   OverrideReader r("line_cone", o, {"theta1", "theta2"});
                   const double t1 = r.real("theta1", pi / 4);
                   const double t2 = r.real("theta2", 3 * pi / 4);
                   Expectation e = converges_finitely();
                   e.max_steps_to_converge = static_cast<std::size_t>(
                       theoretical_bound(BoundKind::LineCone, t1, t2).N);
                   Problem p =
                       make("line_cone", x_axis(), Set::cone2d(t1, t2), r.start({3.0, -1.0}), e);
                   p.start_box = square_box(10.0);
                   return p;
                 }});

    t.push_back({{"polyhedron_2d",
                  "line X x {0} against the triangle (-1,-1), (3,-1), (1,2); finite convergence",
                  {}},
                 [](const Overrides& o) {
                   OverrideReader r("polyhedron_2d", o, {});
                   Set B = Set::polyhedron({Halfspace{{0.0, -1.0}, 1.0},
                                            Halfspace{{3.0, 2.0}, 7.0},
                                            Halfspace{{-3.0, 2.0}, 1.0}});
                   Problem p = make("polyhedron_2d", x_axis(), std::move(B), r.start({4.0, 3.0}),
                                    converges_finitely());
                   p.start_box = square_box(10.0);
                   return p;
                 }});

    t.push_back({{"r3_affine_orthant",
                  "affine line {x + y = 1, x + z = 0} against R+^3; linear, not finite, rate "
                  "1/sqrt(3)",
                  {}},
                 [](const Overrides& o) {
                   OverrideReader r("r3_affine_orthant", o, {});
                   Expectation e;
                   e.status = Status::LinearConvergence;
                   e.rate = 1.0 / std::sqrt(3.0);
                   e.shadow_in_intersection = true;
                   if (!o.count("x0")) e.limit = Vector{1.0 / 3.0, 1.0, 1.0 / 3.0};
                   return make("r3_affine_orthant",
                               Set::affine_subspace(Matrix{{1.0, 1.0, 0.0}, {1.0, 0.0, 1.0}},
                                                    {1.0, 0.0}),
                               Set::orthant(3), r.start({1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0}), e);
                 }});

    t.push_back({{"friedrichs_segment_square",
                  "segment [(2,1,2), (-2,1,-2)] against the square |x|,|y| <= 2, z = 1 (or "
                  "their affine hulls with hulls=true); linear with rate 1/sqrt(2)",
                  {"hulls"}},
                 [](const Overrides& o) {
                   OverrideReader r("friedrichs_segment_square", o, {"hulls"});
                   Expectation e;
                   e.status = Status::LinearConvergence;
                   e.rate = 1.0 / std::sqrt(2.0);
                   e.shadow_limit = Vector{1.0, 1.0, 1.0};
                   e.shadow_in_intersection = true;
                   const Vector x0 = r.start({0.0, 0.0, 0.0});
                   if (r.flag("hulls")) {
                     return make("friedrichs_segment_square",
                                 Set::affine_subspace(Matrix{{0.0, 1.0, 0.0}, {1.0, 0.0, -1.0}},
                                                      {1.0, 0.0}),
                                 Set::hyperplane({0.0, 0.0, 1.0}, 1.0), x0, e);
                   }
                   Set seg = Set::polyhedron(
                       {Halfspace{{0.0, 1.0, 0.0}, 1.0}, Halfspace{{0.0, -1.0, 0.0}, -1.0},
                        Halfspace{{1.0, 0.0, -1.0}, 0.0}, Halfspace{{-1.0, 0.0, 1.0}, 0.0},
                        Halfspace{{1.0, 0.0, 0.0}, 2.0}, Halfspace{{-1.0, 0.0, 0.0}, 2.0}});
                   Set square = Set::polyhedron(
                       {Halfspace{{0.0, 0.0, 1.0}, 1.0}, Halfspace{{0.0, 0.0, -1.0}, -1.0},
                        Halfspace{{1.0, 0.0, 0.0}, 2.0}, Halfspace{{-1.0, 0.0, 0.0}, 2.0},
                        Halfspace{{0.0, 1.0, 0.0}, 2.0}, Halfspace{{0.0, -1.0, 0.0}, 2.0}});
                   return make("friedrichs_segment_square", std::move(seg), std::move(square), x0,
                               e);
                 }});

    std::sort(t.begin(), t.end(),
              [](const Entry& a, const Entry& b) { return a.info.name < b.info.name; });
    return t;
  }();
  return table;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string fmt(const Vector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.dim(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + ")";
}

inline std::string fmt(const std::vector<Vector>& pts) {
  std::string s = "{";
  for (std::size_t i = 0; i < pts.size(); ++i) s += (i ? ", " : "") + fmt(pts[i]);
  return s + "}";
}

inline void check_vector(Verdict& v, const std::string& field, const Vector& expected,
                         const std::optional<Vector>& actual, double tol) {
  const bool ok = actual && actual->dim() == expected.dim() &&
                  max_abs_diff(*actual, expected) <= tol;
  v.checks.push_back({field, fmt(expected), actual ? fmt(*actual) : "none", ok});
}

}  // namespace detail

inline const std::vector<ScenarioInfo>& scenario_registry() {
  static const std::vector<ScenarioInfo> infos = [] {
    std::vector<ScenarioInfo> out;
    for (const auto& e : detail::entries()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

inline std::vector<std::string> list_scenarios() {
  std::vector<std::string> names;
  for (const auto& s : scenario_registry()) names.push_back(s.name);
  return names;
}

inline Problem build(const std::string& name, const Overrides& overrides) {
  for (const auto& e : detail::entries())
    if (e.info.name == name) return e.build(overrides);
  throw InvalidInput("unknown scenario '" + name + "'");
}

inline Verdict check(const Expectation& e, const ConvergenceReport& r) {
  using detail::fmt;
  Verdict v;
  v.checks.push_back(
      {"status", to_string(e.status), to_string(r.status), e.status == r.status});
  if (e.limit) detail::check_vector(v, "limit", *e.limit, r.limit, kLimitTol);
  if (e.shadow_limit)
    detail::check_vector(v, "shadow_limit", *e.shadow_limit, r.shadow_limit, kLimitTol);
  if (e.rate) {
    const bool ok = r.rate && std::abs(*r.rate - *e.rate) <= kRateTol;
    v.checks.push_back({"rate", fmt(*e.rate), r.rate ? fmt(*r.rate) : "none", ok});
  }
  if (e.cycle_period) {
    const bool ok = r.cycle_period == e.cycle_period;
    v.checks.push_back({"cycle_period", std::to_string(*e.cycle_period),
                        r.cycle_period ? std::to_string(*r.cycle_period) : "none", ok});
  }
  if (e.cycle_points) {
    bool ok = r.cycle_points && r.cycle_points->size() == e.cycle_points->size();
    for (std::size_t i = 0; ok && i < e.cycle_points->size(); ++i)
      ok = max_abs_diff((*r.cycle_points)[i], (*e.cycle_points)[i]) <= kCyclePointTol;
    v.checks.push_back({"cycle_points", fmt(*e.cycle_points),
                        r.cycle_points ? fmt(*r.cycle_points) : "none", ok});
  }
  if (e.max_steps_to_converge) {
    const bool ok = r.status == Status::FiniteConvergence && r.n_stop <= *e.max_steps_to_converge;
    v.checks.push_back({"max_steps_to_converge", "<= " + std::to_string(*e.max_steps_to_converge),
                        std::to_string(r.n_stop), ok});
  }
  if (e.best_approx_gap) {
    const bool ok = r.best_approx && std::abs(r.best_approx->gap - *e.best_approx_gap) <= kGapTol;
    v.checks.push_back({"best_approx.gap", fmt(*e.best_approx_gap),
                        r.best_approx ? fmt(r.best_approx->gap) : "none", ok});
  }
  if (e.shadow_in_intersection) {
    v.checks.push_back({"in_intersection.shadow", "true",
                        r.shadow_in_intersection ? "true" : "false", r.shadow_in_intersection});
  }
  return v;
}

inline RunResult run(Problem p, const RunOptions& opts) {
  if (opts.max_iter) p.iterate.max_iter = *opts.max_iter;
  if (opts.fix_tol) p.iterate.fix_tol = *opts.fix_tol;
  Trace trace = iterate(p.A, p.B, p.x0, p.iterate);
  ConvergenceReport report = classify(trace, p.classify);
  Verdict verdict = check(p.expect, report);
  return RunResult{std::move(p), std::move(trace), std::move(report), std::move(verdict)};
}

inline RunResult run(const std::string& name, const Overrides& overrides, const RunOptions& opts) {
  return run(build(name, overrides), opts);
}

inline std::vector<Vector> sample_starts(const Box& box, std::size_t count, std::uint64_t seed) {
  box.lo.require_same_dim(box.hi);
  std::mt19937_64 gen(seed);
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Vector x = Vector::zeros(box.lo.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) {
      std::uniform_real_distribution<double> u(box.lo[i], box.hi[i]);
      x[i] = u(gen);
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace drfeas
