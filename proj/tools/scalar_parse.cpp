#include "scalar_parse.hpp"

#include <cctype>
#include <regex>

#include "betadd/error.hpp"
#include "betadd/scalar.hpp"

namespace betadd::cli {
namespace {

std::string strip(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  }
  return out;
}

}  // namespace

QuadExt parse_quad(const std::string& text) {
  const std::string t = strip(text);
  if (t == "golden") return constants::golden();
  if (t == "sqrt2") return constants::sqrt2();
  if (t == "sqrt3") return constants::sqrt3();
  if (t == "sqrt7") return constants::sqrt7();
  if (t == "one_plus_sqrt2") return constants::one_plus_sqrt2();

  static const std::regex triple(R"(^\(([^,]+),([^,]+),([^,]+)\)$)");
  static const std::regex surd(R"(^([+-]?[0-9./]+)?([+-])?(?:([0-9./]+)\*)?sqrt\(([0-9]+)\)$)");
  std::smatch m;
  if (std::regex_match(t, m, triple)) {
    const Rational p = QuadExt::parse_rational(m[1]);
    const Rational q = QuadExt::parse_rational(m[2]);
    long d = 0;
    try {
      d = std::stol(m[3]);
    } catch (const std::exception&) {
      fail(ErrorKind::Parse, "bad radicand in '" + text + "'");
    }
    return QuadExt::make(p, q, d);
  }
  if (std::regex_match(t, m, surd)) {
    const Rational p = m[1].matched ? QuadExt::parse_rational(m[1]) : Rational(0);
    if (m[1].matched && !m[2].matched) fail(ErrorKind::Parse, "missing sign before sqrt in '" + text + "'");
    Rational q = m[3].matched ? QuadExt::parse_rational(m[3]) : Rational(1);
    if (m[2].matched && m[2].str() == "-") q = -q;
    return QuadExt::make(p, q, std::stol(m[4]));
  }
  return QuadExt(QuadExt::parse_rational(t));
}

Real parse_real(const std::string& text) {
  const std::string t = strip(text);
  static const std::regex decimal(R"(^[+-]?[0-9]*\.?[0-9]+([eE][+-]?[0-9]+)?$)");
  if (std::regex_match(t, decimal)) return Real::parse(t);
  return Real(parse_quad(t));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  for (const auto& s : out) {
    if (strip(s).empty()) fail(ErrorKind::Parse, "empty entry in list '" + text + "'");
  }
  return out;
}

}  // namespace betadd::cli
