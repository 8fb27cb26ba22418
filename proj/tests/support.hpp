#pragma once

#include <random>
#include <vector>

#include "betadd/betadd.hpp"

namespace betadd::testing {

inline QuadExt G() { return constants::golden(); }

inline GreedySystem<QuadExt> golden_system() { return GreedySystem<QuadExt>::make(G(), {0, 3, 4}); }

inline QuadExt rat(long n, long d = 1) { return QuadExt(Rational(n, d)); }

inline Rational random_rational(std::mt19937_64& rng, long max_num, long max_den) {
  std::uniform_int_distribution<long> num(-max_num, max_num);
  std::uniform_int_distribution<long> den(1, max_den);
  Rational r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

inline QuadExt random_quad(std::mt19937_64& rng, long d) {
  return QuadExt::make(random_rational(rng, 50, 20), random_rational(rng, 50, 20), d);
}

/// Uniform rational point in [0, s) with a 2^-30 grid.
inline QuadExt random_point(std::mt19937_64& rng, const QuadExt& s) {
  const long grid = 1L << 30;
  std::uniform_int_distribution<long> u(0, grid - 1);
  const Rational frac(u(rng), grid);
  QuadExt x = QuadExt(frac) * s;
  return x;
}

}  // namespace betadd::testing
