#pragma once

#include <compare>
#include <iosfwd>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace betadd {

class QuadExt;

/// Float backend scalar with binary128 semantics.
///
/// Equality and ordering are tolerant: two values are equivalent when they
/// differ by at most kTolerance relative to max(1, |x|, |y|).
class Real {
 public:
  using Float = boost::multiprecision::cpp_bin_float_quad;

  static constexpr double kTolerance = 1e-18;

  Real() = default;
  Real(long v) : v_(v) {}  // NOLINT(implicit)
  explicit Real(Float v) : v_(std::move(v)) {}
  explicit Real(const QuadExt& x);

  static Real parse(const std::string& text);

  const Float& value() const { return v_; }

  int sign() const;
  Real pow(long k) const;
  Real abs() const;
  double to_double() const;
  std::string to_decimal(int digits) const;
  std::string to_string() const;

  Real& operator+=(const Real& o) { v_ += o.v_; return *this; }
  Real& operator-=(const Real& o) { v_ -= o.v_; return *this; }
  Real& operator*=(const Real& o) { v_ *= o.v_; return *this; }
  Real& operator/=(const Real& o);

  friend Real operator+(Real a, const Real& b) { return a += b; }
  friend Real operator-(Real a, const Real& b) { return a -= b; }
  friend Real operator*(Real a, const Real& b) { return a *= b; }
  friend Real operator/(Real a, const Real& b) { return a /= b; }
  Real operator-() const { return Real(Float(-v_)); }

  friend bool operator==(const Real& a, const Real& b);
  friend std::weak_ordering operator<=>(const Real& a, const Real& b);

  friend std::ostream& operator<<(std::ostream& os, const Real& x);

 private:
  Float v_{0};
};

}  // namespace betadd
