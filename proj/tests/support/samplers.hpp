#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "drfeas/drfeas.hpp"

namespace drfeas::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline std::size_t pick(Rng& g, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(g);
}

inline Vector random_vector(Rng& g, std::size_t n, double h = 10.0) {
  Vector x = Vector::zeros(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = uniform(g, -h, h);
  return x;
}

inline Vector random_direction(Rng& g, std::size_t n) {
  std::normal_distribution<double> z;
  Vector u = Vector::zeros(n);
  do {
    for (std::size_t i = 0; i < n; ++i) u[i] = z(g);
  } while (norm(u) < 1e-3);
  return u / norm(u);
}

namespace detail {
// rank orthonormal vectors in R^dim by Gram-Schmidt on random draws
inline std::vector<Vector> random_orthonormal(Rng& g, std::size_t dim, std::size_t count) {
  std::vector<Vector> out;
  while (out.size() < count) {
    Vector v = random_direction(g, dim);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& q : out) v -= dot(v, q) * q;
    const double n = norm(v);
    if (n > 1e-3) out.push_back(v / n);
  }
  return out;
}
}  // namespace detail

/// m x n matrix of the given rank with singular values in [0.1, 10], so an
/// absolute tolerance is meaningful for everything derived from it.
inline Matrix random_matrix(Rng& g, std::size_t m, std::size_t n, std::size_t rank) {
  const auto us = detail::random_orthonormal(g, m, rank);
  const auto vs = detail::random_orthonormal(g, n, rank);
  Matrix out(m, n, 0.0);
  for (std::size_t k = 0; k < rank; ++k) {
    const double s = uniform(g, 0.1, 10.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) += s * us[k][i] * vs[k][j];
  }
  return out;
}

struct NamedSet {
  std::string label;
  Set set;
};

/// One random convex set of every supported convex variant.
inline std::vector<NamedSet> random_convex_sets(Rng& g) {
  const double pi = std::numbers::pi;
  std::vector<NamedSet> out;
  const std::size_t n = 2 + pick(g, 3);
  out.push_back({"hyperplane", Set::hyperplane(random_vector(g, n, 3.0), uniform(g, -5, 5))});
  out.push_back({"halfspace", Set::halfspace(random_vector(g, n, 3.0), uniform(g, -5, 5))});
  {
    const std::size_t rows = 1 + pick(g, n - 1);
    const Matrix L = random_matrix(g, rows, n, rows);
    out.push_back({"affine", Set::affine_subspace(L, L * random_vector(g, n, 3.0))});
  }
  out.push_back({"ball", Set::ball(random_vector(g, n, 5.0), uniform(g, 0.5, 5.0))});
  {
    const Vector c = random_vector(g, 2, 3.0);
    const Vector d = c + uniform(g, 0.2, 1.5) * random_direction(g, 2);
    out.push_back({"ball_intersection",
                   Set::ball_intersection({Ball{c, uniform(g, 1.0, 3.0)}, Ball{d, uniform(g, 1.0, 3.0)}})});
  }
  out.push_back({"epigraph_linear",
                 Set::epigraph(ConvexFn::linear(random_vector(g, n - 1, 3.0), uniform(g, -3, 3)), n - 1)});
  out.push_back({"epigraph_quadratic", Set::epigraph(ConvexFn::quadratic(uniform(g, -3, 3)), n - 1)});
  out.push_back({"epigraph_cap", Set::epigraph(ConvexFn::lower_cap(uniform(g, -1, 1)), 1 + pick(g, 2))});
  out.push_back({"ray2d", Set::ray2d(uniform(g, -pi, pi))});
  {
    const double t1 = uniform(g, -pi, pi);
    out.push_back({"cone2d", Set::cone2d(t1, t1 + uniform(g, 0.1, pi - 0.1))});
  }
  out.push_back({"orthant", Set::orthant(n)});
  {
    const std::size_t d = 2 + pick(g, 2);
    std::vector<Halfspace> hs;
    const std::size_t m = d + 1 + pick(g, 4);
    for (std::size_t k = 0; k < m; ++k) hs.push_back(Halfspace{random_direction(g, d), uniform(g, 0.5, 4.0)});
    out.push_back({"polyhedron", Set::polyhedron(std::move(hs))});
  }
  return out;
}

inline std::vector<NamedSet> random_nonconvex_sets(Rng& g) {
  std::vector<NamedSet> out;
  const std::size_t n = 2 + pick(g, 2);
  std::vector<Vector> pts;
  for (std::size_t k = 0, m = 2 + pick(g, 5); k < m; ++k) pts.push_back(random_vector(g, n, 5.0));
  out.push_back({"finite", Set::finite(pts)});
  const Vector c = random_vector(g, n, 2.0);
  const Vector e = random_direction(g, n);
  out.push_back({"union", Set::disjoint_union({Set::ball(c, 1.0), Set::ball(c + 4.0 * e, 1.5),
                                               Set::halfspace(e, dot(e, c) - 2.0)})});
  return out;
}

/// A random member of S: for convex S a convex combination of projections.
inline Vector random_member(Rng& g, const Set& s) {
  if (const auto* f = s.get_if<FiniteSet>()) return f->points[pick(g, f->points.size())];
  if (const auto* u = s.get_if<DisjointUnion>())
    return random_member(g, u->components[pick(g, u->components.size())]);
  Vector acc = Vector::zeros(s.dim());
  double wsum = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double w = uniform(g, 0.0, 1.0);
    acc += w * project(s, random_vector(g, s.dim())).selected;
    wsum += w;
  }
  return acc / wsum;
}

}  // namespace drfeas::testing
