#pragma once

// Dense kernels for the 1x1 .. 4x4 symmetric systems that appear in the
// estimators: Gram-matrix solves, symmetric eigenvalues, and the largest
// eigenvalue of a symmetric-definite pencil.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <utility>

#include "aoa/error.hpp"

namespace aoa::num {

inline constexpr double kMaxCondition = 1e12;

template <std::size_t N>
using Vector = std::array<double, N>;

template <std::size_t R, std::size_t C>
class Matrix {
  static_assert(R >= 1 && R <= 4 && C >= 1 && C <= 4, "Matrix is limited to 4x4");

 public:
  constexpr Matrix() = default;

  static constexpr Matrix identity() {
    static_assert(R == C);
    Matrix m;
    for (std::size_t i = 0; i < R; ++i) m(i, i) = 1.0;
    return m;
  }

  static constexpr std::size_t rows() { return R; }
  static constexpr std::size_t cols() { return C; }

  constexpr double& operator()(std::size_t i, std::size_t j) { return data_[i * C + j]; }
  constexpr double operator()(std::size_t i, std::size_t j) const { return data_[i * C + j]; }

  Matrix& operator+=(const Matrix& o) {
    for (std::size_t k = 0; k < R * C; ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    for (std::size_t k = 0; k < R * C; ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }
  friend bool operator==(const Matrix&, const Matrix&) = default;

  Matrix<C, R> transposed() const {
    Matrix<C, R> t;
    for (std::size_t i = 0; i < R; ++i)
      for (std::size_t j = 0; j < C; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

 private:
  std::array<double, R * C> data_{};
};

template <std::size_t R, std::size_t K, std::size_t C>
Matrix<R, C> operator*(const Matrix<R, K>& a, const Matrix<K, C>& b) {
  Matrix<R, C> out;
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < K; ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

template <std::size_t R, std::size_t C>
Vector<R> operator*(const Matrix<R, C>& a, const Vector<C>& x) {
  Vector<R> out{};
  for (std::size_t i = 0; i < R; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < C; ++k) s += a(i, k) * x[k];
    out[i] = s;
  }
  return out;
}

template <std::size_t N>
double norm(const Vector<N>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

template <std::size_t N>
double max_asymmetry(const Matrix<N, N>& a) {
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
  return worst;
}

// Eigenvalues of a symmetric matrix in ascending order. 2x2 uses the closed
// form; larger sizes run cyclic Jacobi sweeps in fixed (p, q) order until the
// off-diagonal norm drops below 1e-14 of the Frobenius norm.
template <std::size_t N>
Vector<N> symmetric_eigenvalues(const Matrix<N, N>& input) {
  Vector<N> ev{};
  if constexpr (N == 1) {
    ev[0] = input(0, 0);
    return ev;
  } else if constexpr (N == 2) {
    const double a = input(0, 0), d = input(1, 1);
    const double b = 0.5 * (input(0, 1) + input(1, 0));
    const double mean = 0.5 * (a + d);
    const double radius = std::hypot(0.5 * (a - d), b);
    ev[0] = mean - radius;
    ev[1] = mean + radius;
    // Recover the small eigenvalue from the determinant when the subtraction
    // above cancels.
    if (std::abs(ev[0]) < 1e-8 * std::abs(ev[1]) && ev[1] != 0.0) {
      ev[0] = (a * d - b * b) / ev[1];
    }
    return ev;
  } else {
    Matrix<N, N> m = input;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = i + 1; j < N; ++j) m(i, j) = m(j, i) = 0.5 * (input(i, j) + input(j, i));
    const double total = m.frobenius_norm();
    for (int sweep = 0; sweep < 100; ++sweep) {
      double off = 0.0;
      for (std::size_t p = 0; p < N; ++p)
        for (std::size_t q = p + 1; q < N; ++q) off += 2.0 * m(p, q) * m(p, q);
      if (std::sqrt(off) <= 1e-14 * total) break;
      for (std::size_t p = 0; p < N; ++p) {
        for (std::size_t q = p + 1; q < N; ++q) {
          const double apq = m(p, q);
          if (apq == 0.0) continue;
          const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
          const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double s = t * c;
          for (std::size_t k = 0; k < N; ++k) {
            const double mkp = m(k, p), mkq = m(k, q);
            m(k, p) = c * mkp - s * mkq;
            m(k, q) = s * mkp + c * mkq;
          }
          for (std::size_t k = 0; k < N; ++k) {
            const double mpk = m(p, k), mqk = m(q, k);
            m(p, k) = c * mpk - s * mqk;
            m(q, k) = s * mpk + c * mqk;
          }
        }
      }
    }
    for (std::size_t i = 0; i < N; ++i) ev[i] = m(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
  }
}

// Ratio of extreme eigenvalue magnitudes; +inf for a singular matrix.
template <std::size_t N>
double condition_number(const Matrix<N, N>& a) {
  const Vector<N> ev = symmetric_eigenvalues(a);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double v : ev) {
    lo = std::min(lo, std::abs(v));
    hi = std::max(hi, std::abs(v));
  }
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

// Lower-triangular L with a = L L^T. Returns false when a pivot is not
// positive (a is not positive definite to working precision).
template <std::size_t N>
bool cholesky(const Matrix<N, N>& a, Matrix<N, N>& l) {
  l = Matrix<N, N>{};
  double scale = 0.0;
  for (std::size_t i = 0; i < N; ++i) scale = std::max(scale, std::abs(a(i, i)));
  if (!(scale > 0.0) || !std::isfinite(scale)) return false;
  for (std::size_t j = 0; j < N; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 1e-14 * scale)) return false;
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < N; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return true;
}

namespace detail {

[[noreturn]] inline void throw_ill_conditioned(const char* what, double cond) {
  std::ostringstream os;
  os << what << " (condition estimate " << cond << ")";
  throw Error(ErrorKind::kIllConditioned, os.str(), cond);
}

template <std::size_t N>
Vector<N> forward_substitute(const Matrix<N, N>& l, Vector<N> b) {
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= l(i, k) * b[k];
    b[i] /= l(i, i);
  }
  return b;
}

template <std::size_t N>
Vector<N> back_substitute_transposed(const Matrix<N, N>& l, Vector<N> b) {
  for (std::size_t ii = N; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < N; ++k) b[ii] -= l(k, ii) * b[k];
    b[ii] /= l(ii, ii);
  }
  return b;
}

// Symmetric positive-definite check shared by the solves below.
template <std::size_t N>
void require_well_conditioned_spd(const Matrix<N, N>& a) {
  if (!a.all_finite()) throw Error(ErrorKind::kIllConditioned, "matrix has non-finite entries");
  const Vector<N> ev = symmetric_eigenvalues(a);
  if (!(ev[0] > 0.0)) {
    throw_ill_conditioned("matrix is not positive definite",
                             std::numeric_limits<double>::infinity());
  }
  const double cond = ev[N - 1] / ev[0];
  if (cond > kMaxCondition) throw_ill_conditioned("matrix is ill-conditioned", cond);
}

}  // namespace detail

// Solves A x = b for symmetric positive-definite A. Throws kIllConditioned
// (carrying the condition estimate) when A is indefinite, singular, or its
// condition number exceeds kMaxCondition.
template <std::size_t N>
Vector<N> solve_spd(const Matrix<N, N>& a, const Vector<N>& b) {
  detail::require_well_conditioned_spd(a);
  Matrix<N, N> l;
  if (!cholesky(a, l)) {
    detail::throw_ill_conditioned("Cholesky factorization failed", condition_number(a));
  }
  return detail::back_substitute_transposed(l, detail::forward_substitute(l, b));
}

template <std::size_t N>
Matrix<N, N> inverse_spd(const Matrix<N, N>& a) {
  Matrix<N, N> inv;
  for (std::size_t j = 0; j < N; ++j) {
    Vector<N> e{};
    e[j] = 1.0;
    const Vector<N> col = solve_spd(a, e);
    for (std::size_t i = 0; i < N; ++i) inv(i, j) = col[i];
  }
  return inv;
}

// Largest lambda with S x = lambda Q x, i.e. lambda_max(Q^-1 S). S must be
// positive definite. With S = L L^T the pencil reduces to the symmetric matrix
// M = L^-1 Q L^-T whose eigenvalues are 1/lambda, so Q is never inverted.
// Returns +inf when Q is singular to working precision (an eigenvalue of M
// below 1e-12 relative to the largest).
template <std::size_t N>
double max_gen_eigenvalue(const Matrix<N, N>& q, const Matrix<N, N>& s) {
  Matrix<N, N> l;
  if (!s.all_finite() || !cholesky(s, l)) {
    throw Error(ErrorKind::kInvalidScatter, "scatter matrix is not positive definite");
  }
  // M = L^-1 Q L^-T, built column by column.
  Matrix<N, N> tmp;  // L^-1 Q
  for (std::size_t j = 0; j < N; ++j) {
    Vector<N> col;
    for (std::size_t i = 0; i < N; ++i) col[i] = q(i, j);
    col = detail::forward_substitute(l, col);
    for (std::size_t i = 0; i < N; ++i) tmp(i, j) = col[i];
  }
  Matrix<N, N> m;
  for (std::size_t i = 0; i < N; ++i) {
    Vector<N> row;
    for (std::size_t j = 0; j < N; ++j) row[j] = tmp(i, j);
    row = detail::forward_substitute(l, row);
    for (std::size_t j = 0; j < N; ++j) m(i, j) = row[j];
  }
  const Vector<N> mu = symmetric_eigenvalues(m);
  double biggest = 0.0;
  for (double v : mu) biggest = std::max(biggest, std::abs(v));
  if (biggest == 0.0) return std::numeric_limits<double>::infinity();
  double best = -std::numeric_limits<double>::infinity();
  for (double v : mu) {
    if (std::abs(v) <= 1e-12 * biggest) return std::numeric_limits<double>::infinity();
    best = std::max(best, 1.0 / v);
  }
  return best;
}

}  // namespace aoa::num
