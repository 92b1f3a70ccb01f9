#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <variant>

#include "drfeas/numerics.hpp"

namespace drfeas {

/// f(x) = <a, x> + c
struct LinearFn {
  Vector a;
  double c = 0.0;
};

/// f(x) = ||x||^2 + c
struct QuadraticFn {
  double c = 0.0;
};

/// f(x) = theta - sqrt(1 - ||x||^2) on the closed unit disk, +inf outside.
/// Its epigraph is the lower unit half-ball centred at (0, theta) topped by
/// a vertical cylinder.
struct LowerCapFn {
  double theta = 0.0;
};

/// Convex function with value, subgradient and proximal oracles.
class ConvexFn {
 public:
  using Variant = std::variant<LinearFn, QuadraticFn, LowerCapFn>;

  ConvexFn(LinearFn f) : fn_(std::move(f)) {}
  ConvexFn(QuadraticFn f) : fn_(f) {}
  ConvexFn(LowerCapFn f) : fn_(f) {}

  static ConvexFn linear(Vector a, double c) { return ConvexFn(LinearFn{std::move(a), c}); }
  static ConvexFn quadratic(double c = 0.0) { return ConvexFn(QuadraticFn{c}); }
  static ConvexFn lower_cap(double theta) { return ConvexFn(LowerCapFn{theta}); }

  const Variant& variant() const { return fn_; }

  std::string name() const {
    return std::visit(
        [](const auto& f) -> std::string {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, LinearFn>) return "linear";
          else if constexpr (std::is_same_v<T, QuadraticFn>) return "quadratic";
          else return "lower_cap";
        },
        fn_);
  }

  /// Dimension fixed by the function itself (linear only); 0 means any.
  std::size_t fixed_dim() const {
    if (const auto* f = std::get_if<LinearFn>(&fn_)) return f->a.dim();
    return 0;
  }

  double value(const Vector& x) const {
    return std::visit(
        [&](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, LinearFn>) {
            return dot(f.a, x) + f.c;
          } else if constexpr (std::is_same_v<T, QuadraticFn>) {
            return norm_squared(x) + f.c;
          } else {
            const double r2 = norm_squared(x);
            if (r2 > 1.0) return std::numeric_limits<double>::infinity();
            return f.theta - std::sqrt(1.0 - r2);
          }
        },
        fn_);
  }

  /// One element of the subdifferential. For the cap, defined on the open
  /// unit disk only.
  Vector subgradient(const Vector& x) const {
    return std::visit(
        [&](const auto& f) -> Vector {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, LinearFn>) {
            x.require_same_dim(f.a);
            return f.a;
          } else if constexpr (std::is_same_v<T, QuadraticFn>) {
            return 2.0 * x;
          } else {
            const double r2 = norm_squared(x);
            if (r2 >= 1.0) throw InvalidInput("lower_cap: subgradient outside open unit disk");
            return x / std::sqrt(1.0 - r2);
          }
        },
        fn_);
  }

  /// argmin_p { t f(p) + 0.5 ||p - x||^2 }, t >= 0.
  Vector prox(double t, const Vector& x) const {
    if (!(t >= 0.0)) throw InvalidInput("prox: step must be nonnegative");
    return std::visit(
        [&](const auto& f) -> Vector {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, LinearFn>) {
            return x - t * f.a;
          } else if constexpr (std::is_same_v<T, QuadraticFn>) {
            return x / (1.0 + 2.0 * t);
          } else {
            return prox_cap(t, x);
          }
        },
        fn_);
  }

 private:
  // The minimizer is s * x/||x|| with s in [0, 1) solving
  //   t s / sqrt(1 - s^2) + s - ||x|| = 0.
  static Vector prox_cap(double t, const Vector& x) {
    const double r = norm(x);
    if (r == 0.0) return x;
    if (t == 0.0 && r <= 1.0) return x;
    auto h = [&](double s) { return t * s / std::sqrt(1.0 - s * s) + s - r; };
    const double s_hi = std::nextafter(1.0, 0.0);
    double s;
    if (h(s_hi) <= 0.0) {
      s = s_hi;
    } else {
      s = bracketed_root(h, 0.0, s_hi, 1e-16);
    }
    return (s / r) * x;
  }

  Variant fn_;
};

}  // namespace drfeas
