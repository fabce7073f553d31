#pragma once

// Exact arithmetic on real symmetric 2 x 2 matrices with rational entries.
// Square roots are taken only where the result is rational, so every value
// here is exact; a non-square radicand throws.

#include <array>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "seqprod/linalg.hpp"

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline Integer exact_isqrt(const Integer& n) {
  if (n < 0) throw std::domain_error("negative radicand");
  const Integer r = boost::multiprecision::sqrt(n);
  if (r * r != n) throw std::domain_error("radicand is not a perfect square");
  return r;
}

inline Rational exact_sqrt(const Rational& x) {
  return Rational(exact_isqrt(boost::multiprecision::numerator(x)), exact_isqrt(boost::multiprecision::denominator(x)));
}

inline double to_double(const Rational& x) { return x.convert_to<double>(); }

/// Row-major [a b; c d].
struct Mat2 {
  std::array<Rational, 4> e{};

  static Mat2 of(Rational a, Rational b, Rational c, Rational d) { return {{a, b, c, d}}; }
  static Mat2 identity() { return of(1, 0, 0, 1); }
  static Mat2 zero() { return of(0, 0, 0, 0); }
  static Mat2 diagonal(Rational a, Rational d) { return of(a, 0, 0, d); }

  const Rational& operator()(int i, int j) const { return e[2 * i + j]; }

  Mat2 transpose() const { return of(e[0], e[2], e[1], e[3]); }
  Rational trace() const { return e[0] + e[3]; }
  Rational det() const { return e[0] * e[3] - e[1] * e[2]; }

  friend Mat2 operator+(const Mat2& x, const Mat2& y) {
    return of(x.e[0] + y.e[0], x.e[1] + y.e[1], x.e[2] + y.e[2], x.e[3] + y.e[3]);
  }
  friend Mat2 operator-(const Mat2& x, const Mat2& y) {
    return of(x.e[0] - y.e[0], x.e[1] - y.e[1], x.e[2] - y.e[2], x.e[3] - y.e[3]);
  }
  friend Mat2 operator*(const Rational& s, const Mat2& x) { return of(s * x.e[0], s * x.e[1], s * x.e[2], s * x.e[3]); }
  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return of(x.e[0] * y.e[0] + x.e[1] * y.e[2], x.e[0] * y.e[1] + x.e[1] * y.e[3],
              x.e[2] * y.e[0] + x.e[3] * y.e[2], x.e[2] * y.e[1] + x.e[3] * y.e[3]);
  }
  friend bool operator==(const Mat2& x, const Mat2& y) { return x.e == y.e; }

  seqprod::CMatrix to_cmatrix() const {
    return seqprod::CMatrix{{to_double(e[0]), to_double(e[1])}, {to_double(e[2]), to_double(e[3])}};
  }
};

/// Rotation with a Pythagorean triple (a, b, c): cos = a/c, sin = b/c.
inline Mat2 rotation(long a, long b, long c) {
  if (a * a + b * b != c * c) throw std::invalid_argument("not a Pythagorean triple");
  const Rational co(a, c);
  const Rational si(b, c);
  return Mat2::of(co, -si, si, co);
}

/// R diag(l1, l2) R^T.
inline Mat2 with_spectrum(const Mat2& r, const Rational& l1, const Rational& l2) {
  return r * Mat2::diagonal(l1, l2) * r.transpose();
}

/// Eigenvalues (ascending) of a symmetric matrix whose discriminant is a
/// rational square.
inline std::array<Rational, 2> eigenvalues(const Mat2& a) {
  if (a(0, 1) != a(1, 0)) throw std::invalid_argument("matrix is not symmetric");
  const Rational diff = a(0, 0) - a(1, 1);
  const Rational root = exact_sqrt(diff * diff + 4 * a(0, 1) * a(0, 1));
  return {(a.trace() - root) / 2, (a.trace() + root) / 2};
}

inline Rational op_norm(const Mat2& a) {
  const auto l = eigenvalues(a);
  return boost::multiprecision::max(boost::multiprecision::abs(l[0]), boost::multiprecision::abs(l[1]));
}

/// sqrt(A) = (A + sqrt(det A) 1) / sqrt(tr A + 2 sqrt(det A)) for positive A.
inline Mat2 sqrt_psd(const Mat2& a) {
  const auto l = eigenvalues(a);
  if (l[0] < 0) throw std::domain_error("matrix is not positive");
  const Rational s = exact_sqrt(a.det());
  const Rational denom = exact_sqrt(a.trace() + 2 * s);
  if (denom == 0) return Mat2::zero();
  const Mat2 root = (Rational(1) / denom) * (a + s * Mat2::identity());
  if (!(root * root == a)) throw std::logic_error("square root check failed");
  return root;
}

inline Mat2 seq_product(const Mat2& p, const Mat2& q) {
  const Mat2 root = sqrt_psd(p);
  return root * q * root;
}

/// Projection onto the range: 1, p / tr p, or 0 by rank.
inline Mat2 ceil(const Mat2& p) {
  const auto l = eigenvalues(p);
  if (l[0] < 0) throw std::domain_error("matrix is not positive");
  if (l[1] == 0) return Mat2::zero();
  if (l[0] > 0) return Mat2::identity();
  return (Rational(1) / p.trace()) * p;
}

inline Mat2 floor(const Mat2& p) { return Mat2::identity() - ceil(Mat2::identity() - p); }

/// ||p^2 - p||, the failure of p * 1 = p for the rule p * q = pqp.
inline Rational pqp_unit_gap(const Mat2& p) { return op_norm(p * p - p); }

/// Largest entrywise distance between an exact and a floating matrix.
inline double max_entry_distance(const Mat2& exact, const seqprod::CMatrix& approx) {
  double out = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out = std::max(out, std::abs(approx(i, j) - seqprod::Complex(to_double(exact(i, j)))));
  return out;
}

}  // namespace oracle
