#pragma once

#include <concepts>
#include <string>
#include <string_view>

#include "betadd/quad_ext.hpp"
#include "betadd/real.hpp"

namespace betadd {

enum class Backend { Exact, Float };

inline std::string_view to_string(Backend b) { return b == Backend::Exact ? "exact" : "float"; }

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<QuadExt> {
  static constexpr Backend backend = Backend::Exact;
  static constexpr bool exact = true;
  static QuadExt from(const QuadExt& x) { return x; }
  static QuadExt from_rational(const Rational& r) { return QuadExt(r); }
  static QuadExt from_integer(const Integer& z) { return QuadExt(Rational(z)); }
  /// Cell-boundary proximity; exact arithmetic has no ambiguity band.
  static bool near(const QuadExt& x, const QuadExt& b) { return x == b; }
};

template <>
struct ScalarTraits<Real> {
  static constexpr Backend backend = Backend::Float;
  static constexpr bool exact = false;
  static constexpr double kBoundaryTolerance = 1e-15;
  static Real from(const QuadExt& x) { return Real(x); }
  static Real from_rational(const Rational& r) { return Real(QuadExt(r)); }
  static Real from_integer(const Integer& z) { return Real(Real::Float(z.get_str())); }
  static bool near(const Real& x, const Real& b) {
    using boost::multiprecision::abs;
    const Real::Float scale = std::max(Real::Float(1), abs(b.value()));
    return abs(x.value() - b.value()) <= scale * Real::Float(kBoundaryTolerance);
  }
};

/// The operations every downstream module needs from a scalar backend.
template <class S>
concept Scalar = requires(const S& a, const S& b, long k, int digits) {
  { a + b } -> std::convertible_to<S>;
  { a - b } -> std::convertible_to<S>;
  { a * b } -> std::convertible_to<S>;
  { a / b } -> std::convertible_to<S>;
  { -a } -> std::convertible_to<S>;
  { a < b } -> std::convertible_to<bool>;
  { a == b } -> std::convertible_to<bool>;
  { a.pow(k) } -> std::convertible_to<S>;
  { a.sign() } -> std::convertible_to<int>;
  { a.to_double() } -> std::convertible_to<double>;
  { a.to_decimal(digits) } -> std::convertible_to<std::string>;
  { ScalarTraits<S>::backend } -> std::convertible_to<Backend>;
};

template <Scalar S>
S smin(const S& a, const S& b) { return b < a ? b : a; }

template <Scalar S>
S smax(const S& a, const S& b) { return a < b ? b : a; }

template <Scalar S>
constexpr Backend backend_of() { return ScalarTraits<S>::backend; }

/// Named constants used throughout examples and the CLI.
namespace constants {
inline QuadExt golden() { return QuadExt::make(Rational(1, 2), Rational(1, 2), 5); }
inline QuadExt sqrt2() { return QuadExt::make(0, 1, 2); }
inline QuadExt sqrt3() { return QuadExt::make(0, 1, 3); }
inline QuadExt sqrt7() { return QuadExt::make(0, 1, 7); }
inline QuadExt one_plus_sqrt2() { return QuadExt::make(1, 1, 2); }
}  // namespace constants

}  // namespace betadd
