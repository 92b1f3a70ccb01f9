#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "drfeas/errors.hpp"

namespace drfeas {

inline constexpr double kDefaultRankTol = 1e-12;

// ---------------------------------------------------------------------------
// Vector
// ---------------------------------------------------------------------------

/// Dense point of R^n. The dimension is fixed at construction; binary
/// arithmetic throws InvalidInput on mismatched dimensions.
class Vector {
 public:
  Vector() = default;
  Vector(std::initializer_list<double> coords) : coords_(coords) {}
  explicit Vector(std::vector<double> coords) : coords_(std::move(coords)) {}

  static Vector zeros(std::size_t dim) { return Vector(std::vector<double>(dim, 0.0)); }
  static Vector unit(std::size_t dim, std::size_t i) {
    Vector e = zeros(dim);
    e.coords_.at(i) = 1.0;
    return e;
  }

  std::size_t dim() const { return coords_.size(); }
  bool empty() const { return coords_.empty(); }

  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }

  std::span<const double> coords() const { return coords_; }
  const std::vector<double>& values() const { return coords_; }

  Vector& operator+=(const Vector& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < dim(); ++i) coords_[i] += o.coords_[i];
    return *this;
  }
  Vector& operator-=(const Vector& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < dim(); ++i) coords_[i] -= o.coords_[i];
    return *this;
  }
  Vector& operator*=(double s) {
    for (double& c : coords_) c *= s;
    return *this;
  }
  Vector& operator/=(double s) {
    for (double& c : coords_) c /= s;
    return *this;
  }

  friend Vector operator+(Vector a, const Vector& b) { return a += b; }
  friend Vector operator-(Vector a, const Vector& b) { return a -= b; }
  friend Vector operator*(Vector a, double s) { return a *= s; }
  friend Vector operator*(double s, Vector a) { return a *= s; }
  friend Vector operator/(Vector a, double s) { return a /= s; }
  friend Vector operator-(Vector a) { return a *= -1.0; }

  bool operator==(const Vector&) const = default;

  void require_same_dim(const Vector& o) const {
    if (o.dim() != dim()) {
      throw InvalidInput("dimension mismatch: " + std::to_string(dim()) + " vs " +
                         std::to_string(o.dim()));
    }
  }

 private:
  std::vector<double> coords_;
};

inline double dot(const Vector& a, const Vector& b) {
  a.require_same_dim(b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_squared(const Vector& a) { return dot(a, a); }

inline double norm(const Vector& a) {
  double s = 0.0;
  for (double c : a.coords()) s = std::hypot(s, c);
  return s;
}

inline double distance(const Vector& a, const Vector& b) { return norm(a - b); }

inline bool all_finite(const Vector& a) {
  return std::all_of(a.coords().begin(), a.coords().end(),
                     [](double c) { return std::isfinite(c); });
}

/// Largest absolute coordinate difference.
inline double max_abs_diff(const Vector& a, const Vector& b) {
  a.require_same_dim(b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline std::ostream& operator<<(std::ostream& os, const Vector& v) {
  os << '(';
  for (std::size_t i = 0; i < v.dim(); ++i) os << (i ? ", " : "") << v[i];
  return os << ')';
}

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

/// Dense row-major matrix with fixed shape.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw InvalidInput("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  /// Stacks the vectors as rows. All vectors must share a dimension.
  static Matrix from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().dim());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows.front().require_same_dim(rows[i]);
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  static Matrix from_columns(const std::vector<Vector>& cols) {
    return from_rows(cols).transpose();
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  Vector row(std::size_t i) const {
    return Vector(std::vector<double>(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                                      data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)));
  }
  Vector col(std::size_t j) const {
    Vector v = Vector::zeros(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double c) { return std::isfinite(c); });
  }

  double max_abs() const {
    double m = 0.0;
    for (double c : data_) m = std::max(m, std::abs(c));
    return m;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw InvalidInput("matrix product shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Vector operator*(const Matrix& a, const Vector& x) {
    if (a.cols_ != x.dim()) throw InvalidInput("matrix-vector shape mismatch");
    Vector y = Vector::zeros(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  friend Matrix operator-(Matrix a, const Matrix& b) {
    a.require_same_shape(b);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) {
    a.require_same_shape(b);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }
  friend Matrix operator*(double s, Matrix a) {
    for (double& c : a.data_) c *= s;
    return a;
  }

  bool operator==(const Matrix&) const = default;

 private:
  void require_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw InvalidInput("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Counter-clockwise rotation of the plane by theta.
inline Matrix rotator(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return Matrix{{c, -s}, {s, c}};
}

/// Unit vector of the plane at angle theta.
inline Vector direction2d(double theta) { return Vector{std::cos(theta), std::sin(theta)}; }

// ---------------------------------------------------------------------------
// Tolerance
// ---------------------------------------------------------------------------

/// Mixed absolute/relative comparison: |a-b| <= abs + rel*max(|a|,|b|).
struct Tolerance {
  double abs = 1e-9;
  double rel = 0.0;

  bool close(double a, double b) const {
    return std::abs(a - b) <= abs + rel * std::max(std::abs(a), std::abs(b));
  }
  bool close(const Vector& a, const Vector& b) const {
    return distance(a, b) <= abs + rel * std::max(norm(a), norm(b));
  }
};

// ---------------------------------------------------------------------------
// Singular value decomposition (one-sided Jacobi)
// ---------------------------------------------------------------------------

/// Thin SVD M = U diag(s) V^T with k = min(rows, cols) singular triplets.
struct Svd {
  Matrix u;                       // rows x k, orthonormal columns where s > 0
  std::vector<double> singular;   // k values, descending
  Matrix v;                       // cols x k, orthonormal columns
};

namespace detail {

// Hestenes one-sided Jacobi on a tall matrix (rows >= cols).
inline Svd jacobi_svd_tall(Matrix a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Matrix v = Matrix::identity(n);
  constexpr double eps = 4.0 * std::numeric_limits<double>::epsilon();
  constexpr int max_sweeps = 80;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += a(i, p) * a(i, p);
          beta += a(i, q) * a(i, q);
          gamma += a(i, p) * a(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double ap = a(i, p);
          const double aq = a(i, q);
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) sigma[j] = std::hypot(sigma[j], a(i, j));
  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < n; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  Svd out{Matrix(m, n), std::vector<double>(n, 0.0), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.singular[k] = sigma[j];
    for (std::size_t i = 0; i < n; ++i) out.v(i, k) = v(i, j);
    if (sigma[j] > 0.0)
      for (std::size_t i = 0; i < m; ++i) out.u(i, k) = a(i, j) / sigma[j];
  }
  return out;
}

}  // namespace detail

/// Thin SVD by one-sided Jacobi rotations. Intended for small matrices.
inline Svd svd(const Matrix& m) {
  if (!m.all_finite()) throw InvalidInput("svd: non-finite matrix entry");
  if (m.rows() >= m.cols()) return detail::jacobi_svd_tall(m);
  Svd t = detail::jacobi_svd_tall(m.transpose());
  return Svd{std::move(t.v), std::move(t.singular), std::move(t.u)};
}

/// Moore-Penrose inverse. Singular values at or below rank_tol * sigma_max
/// are treated as zero.
inline Matrix pseudoinverse(const Matrix& m, double rank_tol = kDefaultRankTol) {
  if (!(rank_tol > 0.0)) throw InvalidInput("pseudoinverse: rank_tol must be positive");
  if (!m.all_finite()) throw InvalidInput("pseudoinverse: non-finite matrix entry");
  Matrix out(m.cols(), m.rows());
  if (m.rows() == 0 || m.cols() == 0) return out;

  const Svd d = svd(m);
  const double sigma_max = *std::max_element(d.singular.begin(), d.singular.end());
  if (sigma_max == 0.0) return out;
  const double cutoff = rank_tol * sigma_max;

  for (std::size_t k = 0; k < d.singular.size(); ++k) {
    const double sigma = d.singular[k];
    if (sigma <= cutoff) continue;
    for (std::size_t i = 0; i < m.cols(); ++i) {
      const double vik = d.v(i, k) / sigma;
      if (vik == 0.0) continue;
      for (std::size_t j = 0; j < m.rows(); ++j) out(i, j) += vik * d.u(j, k);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Orthonormalization
// ---------------------------------------------------------------------------

/// Orthonormal basis of span(vectors) by modified Gram-Schmidt with one
/// reorthogonalization pass. A vector whose remainder is at most
/// rank_tol * (its own norm) is treated as dependent and dropped.
inline std::vector<Vector> orthonormal_basis(const std::vector<Vector>& vectors,
                                             double rank_tol = kDefaultRankTol) {
  std::vector<Vector> basis;
  if (vectors.empty()) return basis;
  for (const Vector& v : vectors) {
    vectors.front().require_same_dim(v);
    const double original = norm(v);
    if (original == 0.0) continue;
    Vector w = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& q : basis) w -= dot(q, w) * q;
    const double remainder = norm(w);
    if (remainder <= rank_tol * original || remainder <= std::numeric_limits<double>::min())
      continue;
    basis.push_back(w / remainder);
  }
  return basis;
}

// ---------------------------------------------------------------------------
// Scalar root finding
// ---------------------------------------------------------------------------

inline constexpr int kMaxBisectionSteps = 200;

/// Bisection on [lo, hi]. Requires g(lo), g(hi) of opposite sign (or one of
/// them zero). Returns t with |g(t)| <= tol or a final bracket width <= tol.
template <class F>
double bracketed_root(F&& g, double lo, double hi, double tol) {
  if (lo > hi) std::swap(lo, hi);
  double glo = g(lo);
  double ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if (std::isnan(glo) || std::isnan(ghi) || (glo > 0.0) == (ghi > 0.0)) {
    throw BracketError("bracketed_root: no sign change on [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
  }
  double mid = 0.5 * (lo + hi);
  for (int step = 0; step < kMaxBisectionSteps; ++step) {
    mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (std::abs(gm) <= tol || hi - lo <= tol) return mid;
    // adjacent doubles: the bracket cannot shrink further
    if (mid <= lo || mid >= hi) return mid;
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return mid;
}

}  // namespace drfeas
