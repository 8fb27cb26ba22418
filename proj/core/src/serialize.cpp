#include "betadd/serialize.hpp"

#include <cstdio>

#include "betadd/error.hpp"

namespace betadd {

json scalar_json(const QuadExt& x) {
  json j;
  j["p_num"] = x.p().get_num().get_str();
  j["p_den"] = x.p().get_den().get_str();
  j["q_num"] = x.q().get_num().get_str();
  j["q_den"] = x.q().get_den().get_str();
  j["d"] = x.d();
  j["decimal"] = x.to_decimal(kDecimalDigits);
  return j;
}

json scalar_json(const Real& x) {
  json j;
  j["value"] = x.to_string();
  j["decimal"] = x.to_decimal(kDecimalDigits);
  return j;
}

QuadExt quad_from_json(const json& j) {
  try {
    const Rational p(Integer(j.at("p_num").get<std::string>()), Integer(j.at("p_den").get<std::string>()));
    const Rational q(Integer(j.at("q_num").get<std::string>()), Integer(j.at("q_den").get<std::string>()));
    return QuadExt::make(p, q, j.at("d").get<long>());
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed scalar: ") + e.what());
  } catch (const std::invalid_argument&) {
    fail(ErrorKind::Parse, "malformed integer in scalar");
  }
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace betadd
