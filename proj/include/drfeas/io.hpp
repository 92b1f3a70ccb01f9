#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "drfeas/classify.hpp"

namespace drfeas {

// ---------------------------------------------------------------------------
// Config documents
// ---------------------------------------------------------------------------

struct RunConfig {
  Set A;
  Set B;
  Vector x0;
  IterateOptions iterate;
  ClassifyOptions classify;
  std::uint64_t seed = 0;
};

RunConfig parse_config(const std::string& text);
Set parse_set(const nlohmann::json& j, const std::string& where);

namespace detail {

using nlohmann::json;

inline void only_keys(const json& j, const std::string& where,
                      std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw InvalidInput(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
      throw InvalidInput(where + ": unknown key '" + k + "'");
  }
}

inline const json& required(const json& j, const std::string& where, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw InvalidInput(where + ": " + key + " required");
  return *it;
}

inline double real_of(const json& j, const std::string& where) {
  if (!j.is_number()) throw InvalidInput(where + ": expected a number");
  return j.get<double>();
}

inline std::size_t count_of(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw InvalidInput(where + ": expected a nonnegative integer");
  return j.get<std::size_t>();
}

inline Vector vector_of(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw InvalidInput(where + ": expected a nonempty array");
  std::vector<double> c;
  for (std::size_t i = 0; i < j.size(); ++i)
    c.push_back(real_of(j[i], where + "[" + std::to_string(i) + "]"));
  return Vector(std::move(c));
}

inline std::vector<Vector> points_of(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw InvalidInput(where + ": expected a nonempty array");
  std::vector<Vector> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(vector_of(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline ConvexFn parse_fn(const json& j, const std::string& where) {
  const std::string type = required(j, where, "type").get<std::string>();
  if (type == "linear") {
    only_keys(j, where, {"type", "a", "c"});
    return ConvexFn::linear(vector_of(required(j, where, "a"), where + ".a"),
                            j.contains("c") ? real_of(j["c"], where + ".c") : 0.0);
  }
  if (type == "quadratic") {
    only_keys(j, where, {"type", "c"});
    return ConvexFn::quadratic(j.contains("c") ? real_of(j["c"], where + ".c") : 0.0);
  }
  if (type == "lower_cap") {
    only_keys(j, where, {"type", "theta"});
    return ConvexFn::lower_cap(real_of(required(j, where, "theta"), where + ".theta"));
  }
  throw InvalidInput(where + ": unknown function type '" + type + "'");
}

inline int line_of_offset(const std::string& text, std::size_t offset, int& column) {
  int line = 1;
  column = 1;
  for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return line;
}

}  // namespace detail

inline Set parse_set(const nlohmann::json& j, const std::string& where) {
  using namespace detail;
  if (!j.is_object()) throw InvalidInput(where + ": expected an object");
  const json& jt = required(j, where, "type");
  if (!jt.is_string()) throw InvalidInput(where + ".type: expected a string");
  const std::string type = jt.get<std::string>();

  if (type == "hyperplane" || type == "halfspace") {
    only_keys(j, where, {"type", "u", "eta"});
    Vector u = vector_of(required(j, where, "u"), where + ".u");
    const double eta = j.contains("eta") ? real_of(j["eta"], where + ".eta") : 0.0;
    return type == "hyperplane" ? Set::hyperplane(std::move(u), eta)
                                : Set::halfspace(std::move(u), eta);
  }
  if (type == "affine") {
    only_keys(j, where, {"type", "L", "v"});
    const auto rows = points_of(required(j, where, "L"), where + ".L");
    return Set::affine_subspace(Matrix::from_rows(rows),
                                vector_of(required(j, where, "v"), where + ".v"));
  }
  if (type == "ball") {
    only_keys(j, where, {"type", "center", "radius"});
    return Set::ball(vector_of(required(j, where, "center"), where + ".center"),
                     real_of(required(j, where, "radius"), where + ".radius"));
  }
  if (type == "ball_intersection") {
    only_keys(j, where, {"type", "balls"});
    const json& jb = required(j, where, "balls");
    if (!jb.is_array()) throw InvalidInput(where + ".balls: expected an array");
    std::vector<Ball> balls;
    for (std::size_t i = 0; i < jb.size(); ++i) {
      const std::string w = where + ".balls[" + std::to_string(i) + "]";
      only_keys(jb[i], w, {"center", "radius"});
      balls.push_back(Ball{vector_of(required(jb[i], w, "center"), w + ".center"),
                           real_of(required(jb[i], w, "radius"), w + ".radius")});
    }
    return Set::ball_intersection(std::move(balls));
  }
  if (type == "epigraph") {
    only_keys(j, where, {"type", "f", "dim"});
    ConvexFn f = parse_fn(required(j, where, "f"), where + ".f");
    std::size_t n = f.fixed_dim();
    if (j.contains("dim")) n = count_of(j["dim"], where + ".dim");
    if (n == 0) throw InvalidInput(where + ": dim required for this function type");
    return Set::epigraph(std::move(f), n);
  }
  if (type == "finite") {
    only_keys(j, where, {"type", "points"});
    return Set::finite(points_of(required(j, where, "points"), where + ".points"));
  }
  if (type == "ray2d") {
    only_keys(j, where, {"type", "theta"});
    return Set::ray2d(real_of(required(j, where, "theta"), where + ".theta"));
  }
  if (type == "cone2d") {
    only_keys(j, where, {"type", "theta1", "theta2"});
    return Set::cone2d(real_of(required(j, where, "theta1"), where + ".theta1"),
                       real_of(required(j, where, "theta2"), where + ".theta2"));
  }
  if (type == "orthant") {
    only_keys(j, where, {"type", "dim"});
    return Set::orthant(count_of(required(j, where, "dim"), where + ".dim"));
  }
  if (type == "polyhedron") {
    only_keys(j, where, {"type", "halfspaces"});
    const json& jh = required(j, where, "halfspaces");
    if (!jh.is_array()) throw InvalidInput(where + ".halfspaces: expected an array");
    std::vector<Halfspace> hs;
    for (std::size_t i = 0; i < jh.size(); ++i) {
      const std::string w = where + ".halfspaces[" + std::to_string(i) + "]";
      only_keys(jh[i], w, {"u", "eta"});
      hs.push_back(Halfspace{vector_of(required(jh[i], w, "u"), w + ".u"),
                             real_of(required(jh[i], w, "eta"), w + ".eta")});
    }
    return Set::polyhedron(std::move(hs));
  }
  if (type == "union") {
    only_keys(j, where, {"type", "components"});
    const json& jc = required(j, where, "components");
    if (!jc.is_array()) throw InvalidInput(where + ".components: expected an array");
    std::vector<Set> parts;
    for (std::size_t i = 0; i < jc.size(); ++i)
      parts.push_back(parse_set(jc[i], where + ".components[" + std::to_string(i) + "]"));
    return Set::disjoint_union(std::move(parts));
  }
  throw InvalidInput(where + ": unknown set type '" + type + "'");
}

inline RunConfig parse_config(const std::string& text) {
  using namespace detail;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    int column = 0;
    const int line = line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0, column);
    throw InvalidInput("config parse error at line " + std::to_string(line) + ", column " +
                       std::to_string(column) + ": " + e.what());
  }
  only_keys(j, "config", {"version", "A", "B", "x0", "options"});
  if (j.contains("version") && (!j["version"].is_number_integer() || j["version"].get<int>() != 1))
    throw InvalidInput("config: unsupported version (expected 1)");
  if (!j.contains("A")) throw InvalidInput("A required");
  if (!j.contains("B")) throw InvalidInput("B required");
  if (!j.contains("x0")) throw InvalidInput("x0 required");

  Set A = parse_set(j["A"], "A");
  Set B = parse_set(j["B"], "B");
  Vector x0 = vector_of(j["x0"], "x0");
  if (A.dim() != B.dim())
    throw InvalidInput("config: A has dimension " + std::to_string(A.dim()) + ", B has " +
                       std::to_string(B.dim()));
  if (x0.dim() != A.dim())
    throw InvalidInput("config: x0 has dimension " + std::to_string(x0.dim()) + ", sets have " +
                       std::to_string(A.dim()));

  RunConfig cfg{std::move(A), std::move(B), std::move(x0), {}, {}, 0};
  if (j.contains("options")) {
    const json& o = j["options"];
    only_keys(o, "options",
              {"max_iter", "fix_tol", "div_threshold", "cycle_max_period", "seed"});
    if (o.contains("max_iter")) cfg.iterate.max_iter = count_of(o["max_iter"], "options.max_iter");
    if (o.contains("fix_tol")) cfg.iterate.fix_tol = real_of(o["fix_tol"], "options.fix_tol");
    if (o.contains("div_threshold"))
      cfg.iterate.div_threshold = real_of(o["div_threshold"], "options.div_threshold");
    if (o.contains("cycle_max_period"))
      cfg.classify.cycle_max_period = count_of(o["cycle_max_period"], "options.cycle_max_period");
    if (o.contains("seed")) cfg.seed = count_of(o["seed"], "options.seed");
  }
  if (cfg.iterate.max_iter < 1) throw InvalidInput("options.max_iter must be >= 1");
  if (!(cfg.iterate.fix_tol >= 0.0)) throw InvalidInput("options.fix_tol must be >= 0");
  if (!(cfg.iterate.div_threshold > 0.0)) throw InvalidInput("options.div_threshold must be > 0");
  if (cfg.classify.cycle_max_period < 1)
    throw InvalidInput("options.cycle_max_period must be >= 1");
  return cfg;
}

// ---------------------------------------------------------------------------
// Trace and report output
// ---------------------------------------------------------------------------

/// Shortest-safe full precision: 17 significant digits round-trip any double.
inline std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string short6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string emit_trace_csv(const Trace& t) {
  const std::size_t d = t.dim();
  std::string out = "n";
  for (std::size_t i = 1; i <= d; ++i) out += ",x_" + std::to_string(i);
  for (std::size_t i = 1; i <= d; ++i) out += ",shadow_" + std::to_string(i);
  out += ",residual,shadow_dist_B\n";
  for (const auto& s : t.steps) {
    out += std::to_string(s.n);
    for (std::size_t i = 0; i < d; ++i) out += "," + full(s.x[i]);
    for (std::size_t i = 0; i < d; ++i) out += "," + full(s.a[i]);
    out += "," + full(s.residual) + "," + full(distance(t.B, s.a)) + "\n";
  }
  return out;
}

namespace detail {
inline nlohmann::json to_json(const Vector& v) { return nlohmann::json(v.values()); }
inline nlohmann::json to_json(const std::optional<Vector>& v) {
  return v ? to_json(*v) : nlohmann::json(nullptr);
}
}  // namespace detail

inline nlohmann::json summary_json(const ConvergenceReport& r) {
  using detail::to_json;
  nlohmann::json j;
  j["status"] = to_string(r.status);
  j["n_stop"] = r.n_stop;
  j["limit"] = to_json(r.limit);
  j["shadow_limit"] = to_json(r.shadow_limit);
  j["rate"] = r.rate ? nlohmann::json(*r.rate) : nlohmann::json(nullptr);
  j["cycle_period"] = r.cycle_period ? nlohmann::json(*r.cycle_period) : nlohmann::json(nullptr);
  if (r.cycle_points) {
    j["cycle_points"] = nlohmann::json::array();
    for (const auto& p : *r.cycle_points) j["cycle_points"].push_back(to_json(p));
  } else {
    j["cycle_points"] = nullptr;
  }
  if (r.best_approx)
    j["best_approx"] = {{"a", to_json(r.best_approx->a)},
                        {"b", to_json(r.best_approx->b)},
                        {"gap", r.best_approx->gap}};
  else
    j["best_approx"] = nullptr;
  j["in_intersection"] = {{"limit", r.limit_in_intersection},
                          {"shadow", r.shadow_in_intersection}};
  return j;
}

/// Machine-readable report; doubles are written with round-trip precision.
inline std::string emit_summary(const ConvergenceReport& r) { return summary_json(r).dump(2) + "\n"; }

inline std::string format_vector6(const Vector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.dim(); ++i) s += (i ? ", " : "") + short6(v[i]);
  return s + ")";
}

/// Human-readable report with 6 significant digits.
inline std::string emit_text_summary(const ConvergenceReport& r) {
  std::string s = "status:        " + to_string(r.status) + "\n";
  s += "n_stop:        " + std::to_string(r.n_stop) + "\n";
  if (r.limit) s += "limit:         " + format_vector6(*r.limit) + "\n";
  if (r.shadow_limit) s += "shadow_limit:  " + format_vector6(*r.shadow_limit) + "\n";
  if (r.rate) s += "rate:          " + short6(*r.rate) + "\n";
  if (r.cycle_period) s += "cycle_period:  " + std::to_string(*r.cycle_period) + "\n";
  if (r.cycle_points)
    for (const auto& p : *r.cycle_points) s += "  cycle point  " + format_vector6(p) + "\n";
  if (r.best_approx) {
    s += "best_approx:   a=" + format_vector6(r.best_approx->a) +
         " b=" + format_vector6(r.best_approx->b) + " gap=" + short6(r.best_approx->gap) + "\n";
  }
  if (r.limit || r.shadow_limit) {
    s += std::string("in A and B:    limit=") + (r.limit_in_intersection ? "yes" : "no") +
         " shadow=" + (r.shadow_in_intersection ? "yes" : "no") + "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------
// SVG drawing
// ---------------------------------------------------------------------------

namespace detail {

struct Bounds {
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = std::numeric_limits<double>::infinity();
  double x1 = -std::numeric_limits<double>::infinity();
  double y1 = -std::numeric_limits<double>::infinity();
  void add(double x, double y) {
    x0 = std::min(x0, x);
    y0 = std::min(y0, y);
    x1 = std::max(x1, x);
    y1 = std::max(y1, y);
  }
};

// Points that should be visible for each drawable set.
inline void set_extent(const Set& s, Bounds& b) {
  if (const auto* ball = s.get_if<Ball>()) {
    b.add(ball->center[0] - ball->radius, ball->center[1] - ball->radius);
    b.add(ball->center[0] + ball->radius, ball->center[1] + ball->radius);
  } else if (const auto* bi = s.get_if<BallIntersection>()) {
    for (const auto& c : bi->balls) set_extent(Set::ball(c.center, c.radius), b);
  } else if (const auto* f = s.get_if<FiniteSet>()) {
    for (const auto& p : f->points) b.add(p[0], p[1]);
  } else if (s.get_if<Ray2D>() || s.get_if<Cone2D>() || s.get_if<Orthant>()) {
    b.add(0.0, 0.0);
  } else if (const auto* u = s.get_if<DisjointUnion>()) {
    for (const auto& c : u->components) set_extent(c, b);
  }
}

class SvgCanvas {
 public:
  SvgCanvas(const Bounds& b) : b_(b) {}

  double sx(double x) const { return x - b_.x0; }
  double sy(double y) const { return b_.y1 - y; }  // y axis points up

  std::string pt(double x, double y) const { return num(sx(x)) + "," + num(sy(y)); }

  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }

  // Segment of the line {p + t d} long enough to cross the whole canvas.
  std::string line(double px, double py, double dx, double dy, const std::string& style) const {
    const double n = std::hypot(dx, dy);
    const double L = 2.0 * std::hypot(b_.x1 - b_.x0, b_.y1 - b_.y0) +
                     std::hypot(px - (b_.x0 + b_.x1) / 2, py - (b_.y0 + b_.y1) / 2);
    dx *= L / n;
    dy *= L / n;
    return segment(px - dx, py - dy, px + dx, py + dy, style);
  }

  std::string segment(double ax, double ay, double bx, double by, const std::string& style) const {
    return "  <line x1=\"" + num(sx(ax)) + "\" y1=\"" + num(sy(ay)) + "\" x2=\"" + num(sx(bx)) +
           "\" y2=\"" + num(sy(by)) + "\" " + style + "/>\n";
  }

  std::string circle(double cx, double cy, double r, const std::string& style) const {
    return "  <circle cx=\"" + num(sx(cx)) + "\" cy=\"" + num(sy(cy)) + "\" r=\"" + num(r) +
           "\" " + style + "/>\n";
  }

  double span() const { return std::max(b_.x1 - b_.x0, b_.y1 - b_.y0); }

 private:
  Bounds b_;
};

inline std::string draw_set(const Set& s, const SvgCanvas& c, const std::string& colour) {
  const std::string solid = "stroke=\"" + colour + "\" stroke-width=\"" +
                            SvgCanvas::num(c.span() * 0.004) + "\" fill=\"none\"";
  const std::string dashed = solid + " stroke-dasharray=\"" + SvgCanvas::num(c.span() * 0.02) + "\"";
  const double far = 4.0 * c.span() + 1.0;
  std::string out;
  if (const auto* h = s.get_if<Hyperplane>()) {
    const double k = h->eta / norm_squared(h->u);
    out += c.line(k * h->u[0], k * h->u[1], -h->u[1], h->u[0], solid);
  } else if (const auto* h = s.get_if<Halfspace>()) {
    const double k = h->eta / norm_squared(h->u);
    out += c.line(k * h->u[0], k * h->u[1], -h->u[1], h->u[0], dashed);
  } else if (const auto* a = s.get_if<AffineSubspace>()) {
    if (a->L.rows() >= 1) {
      const Vector p = a->L_pinv * a->v;
      const Vector n = a->L.row(0);
      if (norm(n) > 0.0) out += c.line(p[0], p[1], -n[1], n[0], solid);
    }
  } else if (const auto* b = s.get_if<Ball>()) {
    out += c.circle(b->center[0], b->center[1], b->radius, solid);
  } else if (const auto* bi = s.get_if<BallIntersection>()) {
    for (const auto& b : bi->balls) out += c.circle(b.center[0], b.center[1], b.radius, dashed);
  } else if (const auto* f = s.get_if<FiniteSet>()) {
    for (const auto& p : f->points)
      out += c.circle(p[0], p[1], c.span() * 0.012, "fill=\"" + colour + "\"");
  } else if (const auto* r = s.get_if<Ray2D>()) {
    out += c.segment(0.0, 0.0, far * std::cos(r->theta), far * std::sin(r->theta), solid);
  } else if (const auto* k = s.get_if<Cone2D>()) {
    for (double th : {k->theta1, k->theta2})
      out += c.segment(0.0, 0.0, far * std::cos(th), far * std::sin(th), solid);
  } else if (s.get_if<Orthant>()) {
    out += c.segment(0.0, 0.0, far, 0.0, solid);
    out += c.segment(0.0, 0.0, 0.0, far, solid);
  } else if (const auto* p = s.get_if<Polyhedron>()) {
    for (const auto& h : p->halfspaces)
      out += c.line(h.eta * h.u[0], h.eta * h.u[1], -h.u[1], h.u[0], dashed);
  } else if (const auto* e = s.get_if<Epigraph>()) {
    if (const auto* lin = std::get_if<LinearFn>(&e->f.variant())) {
      out += c.line(0.0, lin->c, 1.0, lin->a[0], solid);
    } else {
      std::string pts;
      const double lo = std::get_if<LowerCapFn>(&e->f.variant()) ? -1.0 : -far;
      const double hi = -lo;
      for (int i = 0; i <= 400; ++i) {
        const double x = lo + (hi - lo) * i / 400.0;
        const double y = e->f.value(Vector{x});
        if (std::isfinite(y)) pts += (pts.empty() ? "" : " ") + c.pt(x, y);
      }
      out += "  <polyline points=\"" + pts + "\" " + solid + "/>\n";
    }
  } else if (const auto* u = s.get_if<DisjointUnion>()) {
    for (const auto& part : u->components) out += draw_set(part, c, colour);
  }
  return out;
}

}  // namespace detail

/// Trajectory drawing in the (i, j) coordinate plane (0-based). Set outlines
/// are drawn only for planar problems.
inline std::string emit_svg(const Trace& t, std::size_t i = 0, std::size_t j = 1) {
  using detail::SvgCanvas;
  const std::size_t d = t.dim();
  if (d < 2) throw InvalidInput("emit_svg: needs dimension >= 2");
  if (i >= d || j >= d || i == j)
    throw InvalidInput("emit_svg: coordinates must be distinct and below " + std::to_string(d));
  if (t.steps.empty()) throw InvalidInput("emit_svg: empty trace");

  const std::vector<Vector> xs = t.iterates();
  const bool planar = d == 2;
  detail::Bounds b;
  for (const auto& x : xs) b.add(x[i], x[j]);
  if (planar) {
    detail::set_extent(t.A, b);
    detail::set_extent(t.B, b);
  }
  double w = b.x1 - b.x0, h = b.y1 - b.y0;
  if (w <= 0.0) w = std::max(1.0, std::abs(b.x0));
  if (h <= 0.0) h = std::max(1.0, std::abs(b.y0));
  const double cx = (b.x0 + b.x1) / 2, cy = (b.y0 + b.y1) / 2;
  b.x0 = cx - 0.6 * w;  // half width plus 10% margin each side
  b.x1 = cx + 0.6 * w;
  b.y0 = cy - 0.6 * h;
  b.y1 = cy + 0.6 * h;
  const SvgCanvas c(b);
  const double W = b.x1 - b.x0, H = b.y1 - b.y0;

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + SvgCanvas::num(W) + " " +
         SvgCanvas::num(H) + "\" width=\"600\" height=\"" +
         SvgCanvas::num(std::clamp(600.0 * H / W, 60.0, 6000.0)) + "\">\n";
  out += "  <rect x=\"0\" y=\"0\" width=\"" + SvgCanvas::num(W) + "\" height=\"" +
         SvgCanvas::num(H) + "\" fill=\"white\"/>\n";
  if (planar) {
    out += detail::draw_set(t.A, c, "#1f77b4");
    out += detail::draw_set(t.B, c, "#d62728");
  }
  std::string pts;
  for (const auto& x : xs) pts += (pts.empty() ? "" : " ") + c.pt(x[i], x[j]);
  const double s = c.span();
  out += "  <polyline points=\"" + pts + "\" stroke=\"black\" stroke-width=\"" +
         SvgCanvas::num(s * 0.003) + "\" fill=\"none\"/>\n";
  out += c.circle(xs.front()[i], xs.front()[j], s * 0.015,
                  "fill=\"#2ca02c\" class=\"start\"");
  out += c.circle(xs.back()[i], xs.back()[j], s * 0.015,
                  "fill=\"none\" stroke=\"black\" stroke-width=\"" + SvgCanvas::num(s * 0.004) +
                      "\" class=\"end\"");
  out += "</svg>\n";
  return out;
}

}  // namespace drfeas
