#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "drfeas/convex_fn.hpp"
#include "drfeas/numerics.hpp"

namespace drfeas {

// ---------------------------------------------------------------------------
// Set variants
// ---------------------------------------------------------------------------

/// { x : <x, u> = eta }
struct Hyperplane {
  Vector u;
  double eta = 0.0;
};

/// { x : <x, u> <= eta }
struct Halfspace {
  Vector u;
  double eta = 0.0;
};

/// { x : L x = v }, with L^+ cached at construction.
struct AffineSubspace {
  Matrix L;
  Vector v;
  Matrix L_pinv;
};

struct Ball {
  Vector center;
  double radius = 1.0;
};

/// Intersection of finitely many closed balls with nonempty interior
/// overlap. Projection is exact whenever at most two boundary spheres are
/// active at the nearest point (always the case for planar balls in general
/// position).
struct BallIntersection {
  std::vector<Ball> balls;
};

/// epi f in X x R; the last coordinate is the epigraph height.
struct Epigraph {
  ConvexFn f;
  std::size_t base_dim = 1;
};

struct FiniteSet {
  std::vector<Vector> points;
};

/// The ray R_theta(R_+ x {0}) in the plane.
struct Ray2D {
  double theta = 0.0;
};

/// Convex cone generated by the rays at theta1 and theta2 (angular width < pi).
struct Cone2D {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double start = 0.0;  // angle of the clockwise-most edge
  double width = 0.0;  // counter-clockwise opening, in (0, pi)
};

/// Nonnegative orthant R_+^n.
struct Orthant {
  std::size_t dim = 1;
};

/// Intersection of halfspaces in dimension <= 3. Each face candidate
/// (subset of at most dim active constraints) is cached with its
/// pseudoinverse.
struct Polyhedron {
  struct Face {
    Matrix L;
    Vector v;
    Matrix L_pinv;
  };
  std::vector<Halfspace> halfspaces;  // normalized: ||u|| = 1
  std::size_t dim = 2;
  std::vector<Face> faces;
};

class Set;

/// Finite union of pairwise disjoint closed convex sets.
struct DisjointUnion {
  std::vector<Set> components;
};

/// Closed subset of R^n from the supported catalog. Immutable once built;
/// the factories validate every invariant.
class Set {
 public:
  using Variant = std::variant<Hyperplane, Halfspace, AffineSubspace, Ball, BallIntersection,
                               Epigraph, FiniteSet, Ray2D, Cone2D, Orthant, Polyhedron,
                               DisjointUnion>;

  static Set hyperplane(Vector u, double eta);
  static Set halfspace(Vector u, double eta);
  static Set affine_subspace(Matrix L, Vector v);
  static Set ball(Vector center, double radius);
  static Set ball_intersection(std::vector<Ball> balls);
  static Set epigraph(ConvexFn f, std::size_t base_dim);
  static Set finite(std::vector<Vector> points);
  static Set ray2d(double theta);
  static Set cone2d(double theta1, double theta2);
  static Set orthant(std::size_t dim);
  static Set polyhedron(std::vector<Halfspace> halfspaces);
  static Set disjoint_union(std::vector<Set> components);

  const Variant& variant() const { return v_; }
  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&v_);
  }

  /// Ambient dimension n of R^n.
  std::size_t dim() const { return dim_; }

  /// Lower-case identifier of the variant, as used in config files.
  std::string kind() const;

  bool is_convex() const;

 private:
  Set(Variant v, std::size_t dim) : v_(std::move(v)), dim_(dim) {}

  Variant v_;
  std::size_t dim_ = 0;
};

/// Nearest-point set of a projection. For convex sets `all` is a singleton.
struct ProjectionResult {
  Vector selected;
  std::vector<Vector> all;
  double distance = 0.0;
};

ProjectionResult project(const Set& s, const Vector& x);
ProjectionResult project_epigraph(const ConvexFn& f, const Vector& z);
ProjectionResult reflect(const Set& s, const Vector& x);
double distance(const Set& s, const Vector& x);
bool membership(const Set& s, const Vector& x, Tolerance tol = {});

// Two distances tie when they differ by at most this times (1 + min).
inline constexpr double kTieTol = 1e-9;

// ---------------------------------------------------------------------------
// Implementation
// ---------------------------------------------------------------------------

namespace detail {

inline void require_nonzero(const Vector& u, const char* what) {
  if (u.empty() || !all_finite(u) || norm(u) == 0.0)
    throw InvalidInput(std::string(what) + ": normal vector must be finite and nonzero");
}

inline void require_finite(const Vector& x, const char* what) {
  if (x.empty() || !all_finite(x))
    throw InvalidInput(std::string(what) + ": coordinates must be finite and nonempty");
}

inline ProjectionResult singleton(const Vector& x, Vector p) {
  const double d = distance(x, p);
  return ProjectionResult{p, {p}, d};
}

/// Nearest candidates with the lowest-index tie rule.
inline ProjectionResult nearest_of(const Vector& x, std::vector<Vector> candidates) {
  std::vector<double> d(candidates.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    d[i] = distance(x, candidates[i]);
    best = std::min(best, d[i]);
  }
  ProjectionResult out;
  out.distance = best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (d[i] - best <= kTieTol * (1.0 + best)) {
      if (out.all.empty()) out.selected = candidates[i];
      out.all.push_back(std::move(candidates[i]));
    }
  }
  return out;
}

inline Vector project_hyperplane(const Vector& u, double eta, const Vector& x) {
  return x - ((dot(x, u) - eta) / norm_squared(u)) * u;
}

inline Vector project_ball(const Ball& b, const Vector& x) {
  const Vector d = x - b.center;
  const double r = norm(d);
  if (r <= b.radius) return x;
  return b.center + (b.radius / r) * d;
}

inline Vector project_ray(double theta, const Vector& x) {
  const Vector e = direction2d(theta);
  return std::max(dot(x, e), 0.0) * e;
}

inline Vector project_affine(const Matrix& L, const Vector& v, const Matrix& L_pinv,
                             const Vector& x) {
  return x - L_pinv * (L * x - v);
}

// Any unit vector orthogonal to e (||e|| = 1).
inline Vector orthogonal_unit(const Vector& e) {
  std::vector<Vector> seed{e};
  for (std::size_t i = 0; i < e.dim(); ++i) seed.push_back(Vector::unit(e.dim(), i));
  const std::vector<Vector> q = orthonormal_basis(seed, 1e-8);
  return q.size() > 1 ? q[1] : e;
}

// Nearest point of the sphere-sphere intersection of two balls, if nonempty.
inline std::optional<Vector> nearest_on_sphere_pair(const Ball& a, const Ball& b,
                                                    const Vector& x) {
  const Vector cc = b.center - a.center;
  const double d = norm(cc);
  if (d == 0.0 || d > a.radius + b.radius || d < std::abs(a.radius - b.radius)) return {};
  const Vector e = cc / d;
  const double along = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d);
  const double h = std::sqrt(std::max(0.0, a.radius * a.radius - along * along));
  const Vector m = a.center + along * e;
  Vector w = (x - m) - dot(x - m, e) * e;
  const double wn = norm(w);
  const Vector dir = wn > 0.0 ? w / wn : orthogonal_unit(e);
  return m + h * dir;
}

inline bool inside_ball(const Ball& b, const Vector& p) {
  return distance(p, b.center) <= b.radius * (1.0 + 1e-12) + 1e-12;
}

inline Vector project_ball_intersection(const BallIntersection& s, const Vector& x) {
  auto feasible = [&](const Vector& p) {
    return std::all_of(s.balls.begin(), s.balls.end(),
                       [&](const Ball& b) { return inside_ball(b, p); });
  };
  if (feasible(x)) return x;
  std::optional<Vector> best;
  double best_d = std::numeric_limits<double>::infinity();
  auto consider = [&](const Vector& p) {
    if (!feasible(p)) return;
    const double dp = distance(x, p);
    if (dp < best_d) {
      best_d = dp;
      best = p;
    }
  };
  for (const Ball& b : s.balls) consider(project_ball(b, x));
  for (std::size_t i = 0; i < s.balls.size(); ++i)
    for (std::size_t j = i + 1; j < s.balls.size(); ++j)
      if (auto p = nearest_on_sphere_pair(s.balls[i], s.balls[j], x)) consider(*p);
  if (!best) throw NumericalError("ball_intersection: more than two active spheres");
  return *best;
}

inline std::optional<Vector> project_polyhedron_opt(const Polyhedron& s, const Vector& x) {
  std::optional<Vector> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& face : s.faces) {
    Vector p = face.L.rows() == 0 ? x : project_affine(face.L, face.v, face.L_pinv, x);
    if (face.L.rows() > 0 && norm(face.L * p - face.v) > 1e-9 * (1.0 + norm(face.v))) continue;
    bool ok = true;
    for (const auto& h : s.halfspaces) {
      if (dot(h.u, p) > h.eta + 1e-12 * (1.0 + std::abs(h.eta) + norm(p))) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    const double dp = distance(x, p);
    if (dp < best_d) {
      best_d = dp;
      best = std::move(p);
    }
  }
  return best;
}

inline double wrap_angle(double a) {
  // into (-pi, pi]
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

inline Vector project_cone(const Cone2D& c, const Vector& x) {
  const double phi = std::atan2(x[1], x[0]);
  const double rel = wrap_angle(phi - c.start);
  if ((x[0] == 0.0 && x[1] == 0.0) || (rel >= 0.0 && rel <= c.width)) return x;
  const Vector p1 = project_ray(c.start, x);
  const Vector p2 = project_ray(c.start + c.width, x);
  return distance(x, p1) <= distance(x, p2) ? p1 : p2;
}

inline bool is_convex_variant(const Set::Variant& v) {
  if (const auto* f = std::get_if<FiniteSet>(&v)) return f->points.size() == 1;
  if (const auto* u = std::get_if<DisjointUnion>(&v))
    return u->components.size() == 1 && u->components.front().is_convex();
  return true;
}

// Alternating projections between two convex components; throws when the
// gap closes below 1e-9 from any of a few deterministic starts.
inline void check_disjoint_pair(const Set& a, const Set& b, std::size_t index_a,
                                std::size_t index_b) {
  const std::size_t n = a.dim();
  std::vector<Vector> starts{Vector::zeros(n)};
  for (std::size_t k = 0; k < n; ++k) {
    starts.push_back(10.0 * Vector::unit(n, k));
    starts.push_back(-10.0 * Vector::unit(n, k));
  }
  for (const Vector& s : starts) {
    Vector xa = project(a, s).selected;
    for (int it = 0; it < 200; ++it) {
      const Vector xb = project(b, xa).selected;
      xa = project(a, xb).selected;
      if (distance(xa, xb) <= 1e-9) {
        throw InvalidInput("disjoint_union: components " + std::to_string(index_a) + " and " +
                           std::to_string(index_b) + " intersect");
      }
    }
  }
}

}  // namespace detail

// -- factories ---------------------------------------------------------------

inline Set Set::hyperplane(Vector u, double eta) {
  detail::require_nonzero(u, "hyperplane");
  if (!std::isfinite(eta)) throw InvalidInput("hyperplane: eta must be finite");
  const std::size_t n = u.dim();
  return Set(Hyperplane{std::move(u), eta}, n);
}

inline Set Set::halfspace(Vector u, double eta) {
  detail::require_nonzero(u, "halfspace");
  if (!std::isfinite(eta)) throw InvalidInput("halfspace: eta must be finite");
  const std::size_t n = u.dim();
  return Set(Halfspace{std::move(u), eta}, n);
}

inline Set Set::affine_subspace(Matrix L, Vector v) {
  if (L.rows() == 0 || L.cols() == 0) throw InvalidInput("affine: L must be nonempty");
  if (!L.all_finite()) throw InvalidInput("affine: non-finite entry in L");
  if (v.dim() != L.rows()) throw InvalidInput("affine: v must have one entry per row of L");
  detail::require_finite(v, "affine");
  Matrix pinv = pseudoinverse(L);
  if (norm(L * (pinv * v) - v) > 1e-9 * (1.0 + norm(v)))
    throw InvalidInput("affine: v is not in the range of L (empty set)");
  const std::size_t n = L.cols();
  return Set(AffineSubspace{std::move(L), std::move(v), std::move(pinv)}, n);
}

inline Set Set::ball(Vector center, double radius) {
  detail::require_finite(center, "ball");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw InvalidInput("ball: radius must be positive and finite");
  const std::size_t n = center.dim();
  return Set(Ball{std::move(center), radius}, n);
}

inline Set Set::ball_intersection(std::vector<Ball> balls) {
  if (balls.empty()) throw InvalidInput("ball_intersection: need at least one ball");
  for (const Ball& b : balls) {
    (void)Set::ball(b.center, b.radius);
    balls.front().center.require_same_dim(b.center);
  }
  BallIntersection s{std::move(balls)};
  // nonempty: the projection of the first centre must exist
  (void)detail::project_ball_intersection(s, s.balls.front().center);
  const std::size_t n = s.balls.front().center.dim();
  return Set(std::move(s), n);
}

inline Set Set::epigraph(ConvexFn f, std::size_t base_dim) {
  if (base_dim == 0) throw InvalidInput("epigraph: base dimension must be >= 1");
  if (f.fixed_dim() != 0 && f.fixed_dim() != base_dim)
    throw InvalidInput("epigraph: function dimension does not match base dimension");
  if (const auto* lin = std::get_if<LinearFn>(&f.variant())) {
    detail::require_finite(lin->a, "epigraph");
    if (!std::isfinite(lin->c)) throw InvalidInput("epigraph: c must be finite");
  }
  return Set(Epigraph{std::move(f), base_dim}, base_dim + 1);
}

inline Set Set::finite(std::vector<Vector> points) {
  if (points.empty()) throw InvalidInput("finite: need at least one point");
  for (const Vector& p : points) {
    detail::require_finite(p, "finite");
    points.front().require_same_dim(p);
  }
  const std::size_t n = points.front().dim();
  return Set(FiniteSet{std::move(points)}, n);
}

inline Set Set::ray2d(double theta) {
  if (!std::isfinite(theta) || theta < -std::numbers::pi || theta > std::numbers::pi)
    throw InvalidInput("ray2d: theta must lie in [-pi, pi]");
  return Set(Ray2D{theta}, 2);
}

inline Set Set::cone2d(double theta1, double theta2) {
  if (!std::isfinite(theta1) || !std::isfinite(theta2))
    throw InvalidInput("cone2d: angles must be finite");
  const double delta = detail::wrap_angle(theta2 - theta1);
  if (delta == 0.0 || std::abs(delta) >= std::numbers::pi)
    throw InvalidInput("cone2d: angular width must lie strictly between 0 and pi");
  const double start = delta > 0.0 ? theta1 : theta2;
  return Set(Cone2D{theta1, theta2, start, std::abs(delta)}, 2);
}

inline Set Set::orthant(std::size_t dim) {
  if (dim == 0) throw InvalidInput("orthant: dimension must be >= 1");
  return Set(Orthant{dim}, dim);
}

inline Set Set::polyhedron(std::vector<Halfspace> halfspaces) {
  if (halfspaces.empty()) throw InvalidInput("polyhedron: need at least one halfspace");
  const std::size_t n = halfspaces.front().u.dim();
  if (n == 0 || n > 3) throw InvalidInput("polyhedron: dimension must be 1, 2 or 3");
  for (auto& h : halfspaces) {
    detail::require_nonzero(h.u, "polyhedron");
    if (h.u.dim() != n) throw InvalidInput("polyhedron: mixed dimensions");
    if (!std::isfinite(h.eta)) throw InvalidInput("polyhedron: eta must be finite");
    const double s = norm(h.u);
    h.u /= s;
    h.eta /= s;
  }

  Polyhedron p{std::move(halfspaces), n, {}};
  const std::size_t m = p.halfspaces.size();
  std::vector<std::size_t> idx;
  // depth-first enumeration of index subsets of size <= n
  auto enumerate = [&](auto&& self, std::size_t from) -> void {
    std::vector<Vector> rows;
    Vector v = Vector::zeros(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      rows.push_back(p.halfspaces[idx[k]].u);
      v[k] = p.halfspaces[idx[k]].eta;
    }
    Matrix L = Matrix::from_rows(rows);
    Matrix pinv = idx.empty() ? Matrix() : pseudoinverse(L);
    p.faces.push_back({std::move(L), std::move(v), std::move(pinv)});
    if (idx.size() == n) return;
    for (std::size_t i = from; i < m; ++i) {
      idx.push_back(i);
      self(self, i + 1);
      idx.pop_back();
    }
  };
  enumerate(enumerate, 0);

  if (!detail::project_polyhedron_opt(p, Vector::zeros(n)))
    throw InvalidInput("polyhedron: the halfspaces have empty intersection");
  return Set(std::move(p), n);
}

inline Set Set::disjoint_union(std::vector<Set> components) {
  if (components.empty()) throw InvalidInput("disjoint_union: need at least one component");
  const std::size_t n = components.front().dim();
  for (const Set& c : components) {
    if (c.dim() != n) throw InvalidInput("disjoint_union: mixed dimensions");
    if (!c.is_convex()) throw InvalidInput("disjoint_union: components must be convex");
  }
  for (std::size_t i = 0; i < components.size(); ++i)
    for (std::size_t j = i + 1; j < components.size(); ++j)
      detail::check_disjoint_pair(components[i], components[j], i, j);
  return Set(DisjointUnion{std::move(components)}, n);
}

inline std::string Set::kind() const {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Hyperplane>) return "hyperplane";
        else if constexpr (std::is_same_v<T, Halfspace>) return "halfspace";
        else if constexpr (std::is_same_v<T, AffineSubspace>) return "affine";
        else if constexpr (std::is_same_v<T, Ball>) return "ball";
        else if constexpr (std::is_same_v<T, BallIntersection>) return "ball_intersection";
        else if constexpr (std::is_same_v<T, Epigraph>) return "epigraph";
        else if constexpr (std::is_same_v<T, FiniteSet>) return "finite";
        else if constexpr (std::is_same_v<T, Ray2D>) return "ray2d";
        else if constexpr (std::is_same_v<T, Cone2D>) return "cone2d";
        else if constexpr (std::is_same_v<T, Orthant>) return "orthant";
        else if constexpr (std::is_same_v<T, Polyhedron>) return "polyhedron";
        else return "union";
      },
      v_);
}

inline bool Set::is_convex() const { return detail::is_convex_variant(v_); }

// -- projectors --------------------------------------------------------------

inline ProjectionResult project_epigraph(const ConvexFn& f, const Vector& z) {
  if (z.dim() < 2) throw InvalidInput("epigraph: point must have dimension >= 2");
  detail::require_finite(z, "epigraph");
  const std::size_t n = z.dim() - 1;
  if (f.fixed_dim() != 0 && f.fixed_dim() != n)
    throw InvalidInput("epigraph: function dimension does not match point");
  Vector x(std::vector<double>(z.coords().begin(), z.coords().end() - 1));
  const double rho = z[n];

  auto lift = [&](const Vector& p, double height) {
    std::vector<double> c = p.values();
    c.push_back(height);
    return Vector(std::move(c));
  };

  if (const auto* cap = std::get_if<LowerCapFn>(&f.variant())) {
    // The epigraph is the unit half-cylinder above height theta joined with
    // the ball of radius 1 centred at (0, theta). The cap is infinitely steep
    // at the rim, so the prox route is badly conditioned there; project
    // geometrically instead.
    if (rho >= cap->theta) {
      if (norm_squared(x) <= 1.0) return detail::singleton(z, z);
      return detail::singleton(z, lift(x / norm(x), rho));
    }
    const Vector centre = lift(Vector::zeros(n), cap->theta);
    const Vector d = z - centre;
    const double dn = norm(d);
    if (dn <= 1.0) return detail::singleton(z, z);
    return detail::singleton(z, centre + d / dn);
  }

  const double fx = f.value(x);
  if (fx <= rho) return detail::singleton(z, z);

  // phi(t) = f(prox_{t f}(x)) - rho - t is continuous and strictly
  // decreasing with phi(0) = f(x) - rho > 0.
  auto phi = [&](double t) { return f.value(f.prox(t, x)) - rho - t; };
  double hi = 1.0;
  int doublings = 0;
  while (phi(hi) > 0.0) {
    if (++doublings > 60) throw NumericalError("epigraph: root bracket not found");
    hi *= 2.0;
  }
  const double tol = 1e-15 * (1.0 + std::abs(rho) + std::abs(fx));
  const double t = bracketed_root(phi, 0.0, hi, tol);
  const Vector p = f.prox(t, x);
  return detail::singleton(z, lift(p, f.value(p)));
}

inline ProjectionResult project(const Set& s, const Vector& x) {
  if (x.dim() != s.dim()) {
    throw InvalidInput("project: point has dimension " + std::to_string(x.dim()) + ", set has " +
                       std::to_string(s.dim()));
  }
  return std::visit(
      [&](const auto& v) -> ProjectionResult {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Hyperplane>) {
          return detail::singleton(x, detail::project_hyperplane(v.u, v.eta, x));
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          if (dot(x, v.u) <= v.eta) return detail::singleton(x, x);
          return detail::singleton(x, detail::project_hyperplane(v.u, v.eta, x));
        } else if constexpr (std::is_same_v<T, AffineSubspace>) {
          return detail::singleton(x, detail::project_affine(v.L, v.v, v.L_pinv, x));
        } else if constexpr (std::is_same_v<T, Ball>) {
          return detail::singleton(x, detail::project_ball(v, x));
        } else if constexpr (std::is_same_v<T, BallIntersection>) {
          return detail::singleton(x, detail::project_ball_intersection(v, x));
        } else if constexpr (std::is_same_v<T, Epigraph>) {
          return project_epigraph(v.f, x);
        } else if constexpr (std::is_same_v<T, FiniteSet>) {
          return detail::nearest_of(x, v.points);
        } else if constexpr (std::is_same_v<T, Ray2D>) {
          return detail::singleton(x, detail::project_ray(v.theta, x));
        } else if constexpr (std::is_same_v<T, Cone2D>) {
          return detail::singleton(x, detail::project_cone(v, x));
        } else if constexpr (std::is_same_v<T, Orthant>) {
          Vector p = x;
          for (std::size_t i = 0; i < p.dim(); ++i) p[i] = std::max(p[i], 0.0);
          return detail::singleton(x, std::move(p));
        } else if constexpr (std::is_same_v<T, Polyhedron>) {
          auto p = detail::project_polyhedron_opt(v, x);
          if (!p) throw NumericalError("polyhedron: no feasible face candidate");
          return detail::singleton(x, std::move(*p));
        } else {
          std::vector<Vector> candidates;
          candidates.reserve(v.components.size());
          for (const Set& c : v.components) candidates.push_back(project(c, x).selected);
          return detail::nearest_of(x, std::move(candidates));
        }
      },
      s.variant());
}

inline ProjectionResult reflect(const Set& s, const Vector& x) {
  ProjectionResult p = project(s, x);
  for (Vector& a : p.all) a = 2.0 * a - x;
  p.selected = 2.0 * p.selected - x;
  return p;
}

inline double distance(const Set& s, const Vector& x) { return project(s, x).distance; }

inline bool membership(const Set& s, const Vector& x, Tolerance tol) {
  const ProjectionResult p = project(s, x);
  return p.distance <= tol.abs + tol.rel * std::max(norm(x), norm(p.selected));
}

}  // namespace drfeas
