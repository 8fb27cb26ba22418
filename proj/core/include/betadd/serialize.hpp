#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "betadd/density.hpp"
#include "betadd/quad_ext.hpp"
#include "betadd/real.hpp"
#include "betadd/scalar.hpp"
#include "betadd/step_fn.hpp"
#include "betadd/system.hpp"

namespace betadd {

using json = nlohmann::ordered_json;

inline constexpr int kDecimalDigits = 20;

/// {"p_num","p_den","q_num","q_den","d","decimal"}; integers are strings so they never lose precision.
json scalar_json(const QuadExt& x);
json scalar_json(const Real& x);

QuadExt quad_from_json(const json& j);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

template <Scalar S>
json system_json(const GreedySystem<S>& sys) {
  json j;
  j["backend"] = std::string(to_string(sys.backend()));
  j["beta"] = scalar_json(sys.beta());
  json digits = json::array();
  for (const auto& d : sys.digit_set().digits) digits.push_back(scalar_json(d));
  j["digits"] = digits;
  j["shift"] = scalar_json(sys.digit_set().shift);
  j["support_case"] = std::string(to_string(sys.support_case()));
  j["s"] = scalar_json(sys.support_end());
  json cells = json::array();
  for (const auto& c : sys.cells()) {
    cells.push_back({{"digit", scalar_json(sys.digit(c.digit))},
                     {"left", scalar_json(c.left)},
                     {"right", scalar_json(c.right)}});
  }
  j["cells"] = cells;
  return j;
}

template <Scalar S>
json step_fn_json(const StepFn<S>& f) {
  json j;
  json bps = json::array();
  for (const auto& b : f.breakpoints) bps.push_back(scalar_json(b));
  json vals = json::array();
  for (const auto& v : f.values) vals.push_back(scalar_json(v));
  j["breakpoints"] = bps;
  j["values"] = vals;
  j["normalized"] = f.normalized;
  j["backend"] = std::string(to_string(f.backend()));
  return j;
}

/// left,right,value rows with a header line.
template <Scalar S>
std::string step_fn_csv(const StepFn<S>& f, int digits = kDecimalDigits) {
  std::string out = "left,right,value\n";
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    out += f.breakpoints[i].to_decimal(digits) + "," + f.breakpoints[i + 1].to_decimal(digits) + "," +
           f.values[i].to_decimal(digits) + "\n";
  }
  return out;
}

template <Scalar S>
json orbit_json(const GreedySystem<S>& sys, const OrbitRecord<S>& o) {
  json j;
  j["start"] = scalar_json(o.start);
  json vals = json::array();
  for (const auto& v : o.values) vals.push_back(scalar_json(v));
  j["values"] = vals;
  json digits = json::array();
  for (auto sym : o.digits.symbols) digits.push_back(scalar_json(sys.digit(sym)));
  j["digits"] = digits;
  j["preperiod"] = o.preperiod ? json(*o.preperiod) : json(nullptr);
  j["period"] = o.period ? json(*o.period) : json(nullptr);
  j["ambiguous_steps"] = o.ambiguous_steps;
  return j;
}

template <Scalar S>
std::string orbit_csv(const GreedySystem<S>& sys, const OrbitRecord<S>& o, int digits = kDecimalDigits) {
  std::string out = "step,value,digit\n";
  for (std::size_t k = 0; k < o.values.size(); ++k) {
    out += std::to_string(k) + "," + o.values[k].to_decimal(digits) + ",";
    if (k < o.digits.size()) out += sys.digit(o.digits.symbols[k]).to_decimal(0);
    out += "\n";
  }
  return out;
}

}  // namespace betadd
