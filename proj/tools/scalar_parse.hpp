#pragma once

#include <string>
#include <vector>

#include "betadd/quad_ext.hpp"
#include "betadd/real.hpp"

namespace betadd::cli {

/// Accepts a named constant (golden, sqrt2, sqrt3, sqrt7, one_plus_sqrt2),
/// a rational or decimal, "p+q*sqrt(d)" in any of its short forms, or "(p,q,d)".
QuadExt parse_quad(const std::string& text);

/// Decimal strings keep their full precision; anything else goes through parse_quad.
Real parse_real(const std::string& text);

/// Splits on commas that are not inside parentheses.
std::vector<std::string> split_list(const std::string& text);

}  // namespace betadd::cli
