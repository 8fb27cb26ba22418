#include "betadd/real.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

#include "betadd/error.hpp"
#include "betadd/quad_ext.hpp"

namespace betadd {
namespace {

Real::Float from_rational(const Rational& r) {
  return Real::Float(r.get_num().get_str()) / Real::Float(r.get_den().get_str());
}

}  // namespace

Real::Real(const QuadExt& x) {
  v_ = from_rational(x.p());
  if (x.d() != 0) v_ += from_rational(x.q()) * boost::multiprecision::sqrt(Float(x.d()));
}

Real Real::parse(const std::string& text) {
  try {
    return Real(Float(text));
  } catch (const std::exception&) {
    fail(ErrorKind::Parse, "cannot parse float '" + text + "'");
  }
}

Real& Real::operator/=(const Real& o) {
  if (o.v_ == 0) fail(ErrorKind::DivisionByZero, "division by zero");
  v_ /= o.v_;
  return *this;
}

int Real::sign() const {
  const Real zero;
  if (*this == zero) return 0;
  return v_ < 0 ? -1 : 1;
}

Real Real::pow(long k) const {
  if (k < 0) return Real(1) / pow(-k);
  Real result(1);
  Real base = *this;
  while (k > 0) {
    if (k & 1) result *= base;
    k >>= 1;
    if (k) base *= base;
  }
  return result;
}

Real Real::abs() const { return Real(Float(boost::multiprecision::abs(v_))); }

double Real::to_double() const { return v_.convert_to<double>(); }

std::string Real::to_decimal(int digits) const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v_;
  std::string s = os.str();
  if (s.size() > 1 && s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string Real::to_string() const {
  std::ostringstream os;
  os << std::setprecision(36) << v_;
  return os.str();
}

bool operator==(const Real& a, const Real& b) {
  using boost::multiprecision::abs;
  const Real::Float scale = std::max({Real::Float(1), abs(a.v_), abs(b.v_)});
  return abs(a.v_ - b.v_) <= scale * Real::Float(Real::kTolerance);
}

std::weak_ordering operator<=>(const Real& a, const Real& b) {
  if (a == b) return std::weak_ordering::equivalent;
  return a.v_ < b.v_ ? std::weak_ordering::less : std::weak_ordering::greater;
}

std::ostream& operator<<(std::ostream& os, const Real& x) { return os << x.to_string(); }

}  // namespace betadd
