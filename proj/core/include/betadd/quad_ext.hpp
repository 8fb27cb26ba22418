#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>

#include <gmpxx.h>

namespace betadd {

using Rational = mpq_class;
using Integer = mpz_class;

/// Exact element p + q*sqrt(d) of a real quadratic field, or a plain
/// rational when d == 0.
///
/// Canonical form: p and q in lowest terms with positive denominators,
/// d square-free, and d == 0 whenever q == 0. Two values compare only when
/// they share a radicand or one of them is rational.
class QuadExt {
 public:
  QuadExt() = default;
  QuadExt(long value) : p_(value) {}  // NOLINT(implicit)
  explicit QuadExt(Rational value);

  /// Throws NegativeRadicand / NonSquareFreeRadicand.
  static QuadExt make(const Rational& p, const Rational& q, long d);

  /// Parses "7", "-3/4", "2.25".
  static Rational parse_rational(const std::string& text);

  const Rational& p() const { return p_; }
  const Rational& q() const { return q_; }
  long d() const { return d_; }
  bool is_rational() const { return d_ == 0; }

  int sign() const;
  QuadExt inverse() const;
  QuadExt conjugate() const;
  QuadExt pow(long k) const;

  /// Exact floor as an integer.
  Integer floor() const;

  double to_double() const;

  /// Correctly rounded (round half to even) decimal with `digits` places.
  std::string to_decimal(int digits) const;

  /// Human-readable exact form, e.g. "1/2+1/2*sqrt(5)".
  std::string to_string() const;

  std::size_t hash() const;

  QuadExt& operator+=(const QuadExt& o);
  QuadExt& operator-=(const QuadExt& o);
  QuadExt& operator*=(const QuadExt& o);
  QuadExt& operator/=(const QuadExt& o);

  friend QuadExt operator+(QuadExt a, const QuadExt& b) { return a += b; }
  friend QuadExt operator-(QuadExt a, const QuadExt& b) { return a -= b; }
  friend QuadExt operator*(QuadExt a, const QuadExt& b) { return a *= b; }
  friend QuadExt operator/(QuadExt a, const QuadExt& b) { return a /= b; }
  QuadExt operator-() const;

  friend bool operator==(const QuadExt& a, const QuadExt& b);
  friend std::strong_ordering operator<=>(const QuadExt& a, const QuadExt& b);

  friend std::ostream& operator<<(std::ostream& os, const QuadExt& x);

 private:
  static long common_radicand(const QuadExt& a, const QuadExt& b);
  void canonicalize();

  Rational p_{0};
  Rational q_{0};
  long d_ = 0;
};

/// Sign of x - y without floating point.
std::strong_ordering compare(const QuadExt& x, const QuadExt& y);

bool is_square_free(long d);

}  // namespace betadd

template <>
struct std::hash<betadd::QuadExt> {
  std::size_t operator()(const betadd::QuadExt& x) const noexcept { return x.hash(); }
};
