#include "betadd/quad_ext.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <sstream>

#include "betadd/error.hpp"

namespace betadd {
namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_mpz(const mpz_class& z, std::size_t seed) {
  seed = mix(seed, static_cast<std::size_t>(mpz_sgn(z.get_mpz_t()) + 1));
  const std::size_t n = mpz_size(z.get_mpz_t());
  for (std::size_t i = 0; i < n; ++i) {
    seed = mix(seed, static_cast<std::size_t>(mpz_getlimbn(z.get_mpz_t(), i)));
  }
  return seed;
}

Integer floor_rational(const Rational& r) {
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return out;
}

std::size_t bit_size(const Rational& r) {
  return mpz_sizeinbase(r.get_num_mpz_t(), 2) + mpz_sizeinbase(r.get_den_mpz_t(), 2);
}

}  // namespace

bool is_square_free(long d) {
  if (d < 0) return false;
  for (long f = 2; f * f <= d; ++f) {
    if (d % (f * f) == 0) return false;
  }
  return true;
}

QuadExt::QuadExt(Rational value) : p_(std::move(value)) { p_.canonicalize(); }

QuadExt QuadExt::make(const Rational& p, const Rational& q, long d) {
  if (d < 0) fail(ErrorKind::NegativeRadicand, "radicand must be non-negative");
  if (d > 1 && !is_square_free(d)) {
    fail(ErrorKind::NonSquareFreeRadicand, "radicand " + std::to_string(d) + " is not square-free");
  }
  QuadExt x;
  x.p_ = p;
  x.q_ = q;
  x.p_.canonicalize();
  x.q_.canonicalize();
  if (d == 1) {
    x.p_ += x.q_;
    x.q_ = 0;
    d = 0;
  }
  x.d_ = d;
  x.canonicalize();
  return x;
}

Rational QuadExt::parse_rational(const std::string& text) {
  std::string t;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
  }
  if (t.empty()) fail(ErrorKind::Parse, "empty number");
  try {
    const auto slash = t.find('/');
    if (slash != std::string::npos) {
      Rational r(Integer(t.substr(0, slash)), Integer(t.substr(slash + 1)));
      if (r.get_den() == 0) fail(ErrorKind::Parse, "zero denominator in '" + text + "'");
      r.canonicalize();
      return r;
    }
    const auto dot = t.find('.');
    if (dot != std::string::npos) {
      std::string digits = t.substr(0, dot) + t.substr(dot + 1);
      const std::size_t frac = t.size() - dot - 1;
      if (digits.empty() || digits == "-" || digits == "+") fail(ErrorKind::Parse, "bad decimal '" + text + "'");
      if (digits[0] == '+') digits.erase(0, 1);
      Integer den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
      Rational r(Integer(digits), den);
      r.canonicalize();
      return r;
    }
    if (t[0] == '+') t.erase(0, 1);
    return Rational(Integer(t));
  } catch (const std::invalid_argument&) {
    fail(ErrorKind::Parse, "cannot parse number '" + text + "'");
  }
}

void QuadExt::canonicalize() {
  if (q_ == 0) d_ = 0;
  if (d_ == 0) q_ = 0;
}

long QuadExt::common_radicand(const QuadExt& a, const QuadExt& b) {
  if (a.d_ == 0) return b.d_;
  if (b.d_ == 0 || a.d_ == b.d_) return a.d_;
  fail(ErrorKind::IncompatibleRadicands,
       "radicands " + std::to_string(a.d_) + " and " + std::to_string(b.d_) + " differ");
}

int QuadExt::sign() const {
  const int sp = sgn(p_);
  const int sq = sgn(q_);
  if (sq == 0) return sp;
  if (sp == 0 || sp == sq) return sq;
  // p and q*sqrt(d) have opposite signs: the larger square wins.
  const Rational lhs = p_ * p_;
  const Rational rhs = q_ * q_ * d_;
  const int c = cmp(lhs, rhs);
  if (c == 0) return 0;
  return c > 0 ? sp : sq;
}

QuadExt QuadExt::operator-() const {
  QuadExt x = *this;
  x.p_ = -x.p_;
  x.q_ = -x.q_;
  return x;
}

QuadExt& QuadExt::operator+=(const QuadExt& o) {
  d_ = common_radicand(*this, o);
  p_ += o.p_;
  q_ += o.q_;
  canonicalize();
  return *this;
}

QuadExt& QuadExt::operator-=(const QuadExt& o) {
  d_ = common_radicand(*this, o);
  p_ -= o.p_;
  q_ -= o.q_;
  canonicalize();
  return *this;
}

QuadExt& QuadExt::operator*=(const QuadExt& o) {
  const long d = common_radicand(*this, o);
  Rational np = p_ * o.p_ + q_ * o.q_ * d;
  Rational nq = p_ * o.q_ + q_ * o.p_;
  p_ = std::move(np);
  q_ = std::move(nq);
  d_ = d;
  canonicalize();
  return *this;
}

QuadExt QuadExt::conjugate() const {
  QuadExt x = *this;
  x.q_ = -x.q_;
  return x;
}

QuadExt QuadExt::inverse() const {
  if (sign() == 0) fail(ErrorKind::DivisionByZero, "division by zero");
  if (d_ == 0) return QuadExt(Rational(1) / p_);
  // 1/(p + q r) = (p - q r) / (p^2 - q^2 d); the norm is nonzero since d is square-free.
  const Rational norm = p_ * p_ - q_ * q_ * d_;
  QuadExt x;
  x.p_ = p_ / norm;
  x.q_ = -q_ / norm;
  x.d_ = d_;
  x.canonicalize();
  return x;
}

QuadExt& QuadExt::operator/=(const QuadExt& o) {
  common_radicand(*this, o);
  return *this *= o.inverse();
}

QuadExt QuadExt::pow(long k) const {
  if (k < 0) return inverse().pow(-k);
  QuadExt result(1);
  QuadExt base = *this;
  while (k > 0) {
    if (k & 1) result *= base;
    k >>= 1;
    if (k) base *= base;
  }
  return result;
}

bool operator==(const QuadExt& a, const QuadExt& b) {
  return a.d_ == b.d_ && a.p_ == b.p_ && a.q_ == b.q_;
}

std::strong_ordering operator<=>(const QuadExt& a, const QuadExt& b) {
  return compare(a, b);
}

std::strong_ordering compare(const QuadExt& x, const QuadExt& y) {
  const int s = (x - y).sign();
  if (s < 0) return std::strong_ordering::less;
  if (s > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Integer QuadExt::floor() const {
  if (d_ == 0) return floor_rational(p_);
  const mp_bitcnt_t bits = static_cast<mp_bitcnt_t>(bit_size(p_) + bit_size(q_) + 128);
  mpf_class approx(0, bits);
  mpf_class root(d_, bits);
  root = sqrt(root);
  approx = mpf_class(p_, bits) + mpf_class(q_, bits) * root;
  mpf_class fl(0, bits);
  mpf_floor(fl.get_mpf_t(), approx.get_mpf_t());
  Integer n(fl);
  while (QuadExt(Rational(n)) > *this) n -= 1;
  while (QuadExt(Rational(n + 1)) <= *this) n += 1;
  return n;
}

double QuadExt::to_double() const {
  if (d_ == 0) return p_.get_d();
  mpf_class root(d_, 256);
  root = sqrt(root);
  mpf_class v = mpf_class(p_, 256) + mpf_class(q_, 256) * root;
  return v.get_d();
}

std::string QuadExt::to_decimal(int digits) const {
  if (digits < 0) digits = 0;
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  const QuadExt scaled = *this * QuadExt(Rational(scale));
  Integer n = scaled.floor();
  const QuadExt twice_rem = (scaled - QuadExt(Rational(n))) * QuadExt(2);
  const auto c = compare(twice_rem, QuadExt(1));
  if (c > 0 || (c == 0 && mpz_odd_p(n.get_mpz_t()))) n += 1;

  const bool negative = n < 0;
  Integer mag = abs(n);
  std::string s = mag.get_str();
  if (static_cast<int>(s.size()) <= digits) s.insert(0, static_cast<std::size_t>(digits) - s.size() + 1, '0');
  if (digits > 0) s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  return negative ? "-" + s : s;
}

std::string QuadExt::to_string() const {
  if (d_ == 0) return p_.get_str();
  std::ostringstream os;
  if (p_ != 0) {
    os << p_.get_str();
    if (q_ > 0) os << '+';
  }
  if (q_ == -1) {
    os << '-';
  } else if (q_ != 1) {
    os << q_.get_str() << '*';
  }
  os << "sqrt(" << d_ << ')';
  return os.str();
}

std::size_t QuadExt::hash() const {
  std::size_t h = static_cast<std::size_t>(d_);
  h = hash_mpz(p_.get_num(), h);
  h = hash_mpz(p_.get_den(), h);
  h = hash_mpz(q_.get_num(), h);
  h = hash_mpz(q_.get_den(), h);
  return h;
}

std::ostream& operator<<(std::ostream& os, const QuadExt& x) { return os << x.to_string(); }

}  // namespace betadd
