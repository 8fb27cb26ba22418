#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "betadd/error.hpp"
#include "betadd/intervals.hpp"
#include "betadd/scalar.hpp"
#include "betadd/step_fn.hpp"
#include "betadd/system.hpp"

namespace betadd {

enum class DensityMode { Auto, Closed, Truncated };

inline std::string_view to_string(DensityMode m);

inline constexpr std::size_t kDefaultKeyLimit = 4096;
inline constexpr double kDefaultRelativeTail = 1e-12;

/// Unnormalized density 1_[0,s) + sum of weight * 1_[0,key).
template <Scalar S>
struct PhiResult {
  StepFn<S> phi;
  std::vector<std::pair<S, S>> terms;  // (key, weight), sorted by key
  S base{1};
  S tail_sup_bound{0};                 // sup-norm distance to the untruncated phi
  DensityMode mode = DensityMode::Closed;
  std::size_t depth = 0;               // truncation depth; 0 in closed mode
  bool converged = true;               // truncated: relative tail target reached
};

namespace detail {

/// Solves A x = b by Gaussian elimination; exact for QuadExt.
template <Scalar S>
std::vector<S> solve(std::vector<std::vector<S>> a, std::vector<S> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col].sign() == 0) ++piv;
    if (piv == n) fail(ErrorKind::NotEventuallyPeriodic, "weight system is singular");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    const S inv = S(1) / a[col][col];
    for (std::size_t k = col; k < n; ++k) a[col][k] = a[col][k] * inv;
    b[col] = b[col] * inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col].sign() == 0) continue;
      const S f = a[r][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] = a[r][k] - f * a[col][k];
      b[r] = b[r] - f * b[col];
    }
  }
  return b;
}

template <Scalar S>
std::vector<std::pair<S, S>> sorted_terms(std::map<S, S> weights) {
  std::vector<std::pair<S, S>> out;
  for (auto& [k, w] : weights) out.emplace_back(k, std::move(w));
  return out;
}

}  // namespace detail

/// Closed-form phi: the image-end graph is finite, so per-key weights solve
/// W (I - M/beta) = v1/beta exactly.
template <Scalar S>
PhiResult<S> phi_closed(const GreedySystem<S>& sys, std::size_t key_limit = kDefaultKeyLimit) {
  if constexpr (!ScalarTraits<S>::exact) {
    fail(ErrorKind::ExactBackendRequired, "closed mode needs the exact backend");
  } else {
    const S& s = sys.support_end();
    const S& beta = sys.beta();
    std::unordered_map<S, std::size_t> index;
    std::vector<S> keys;
    std::vector<std::map<std::size_t, long>> edges;
    auto intern = [&](const S& t) {
      auto [it, inserted] = index.emplace(t, keys.size());
      if (inserted) {
        if (keys.size() >= key_limit) {
          fail(ErrorKind::NotEventuallyPeriodic, "image ends did not close within " + std::to_string(key_limit) + " keys");
        }
        keys.push_back(t);
        edges.emplace_back();
      }
      return it->second;
    };
    std::map<std::size_t, long> level1;
    for (std::size_t j = 0; j < sys.cells().size(); ++j) {
      auto end = branch_end(sys, s, j);
      if (!end) break;
      if (!(*end == s)) ++level1[intern(*end)];
    }
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const S t = keys[i];
      for (std::size_t j = 0; j < sys.cells().size(); ++j) {
        auto end = branch_end(sys, t, j);
        if (!end) break;
        if (!(*end == s)) {
          const std::size_t k = intern(*end);
          ++edges[i][k];
        }
      }
    }
    const std::size_t n = keys.size();
    const S inv = S(1) / beta;
    std::vector<std::vector<S>> a(n, std::vector<S>(n, S(0)));
    std::vector<S> rhs(n, S(0));
    for (std::size_t i = 0; i < n; ++i) a[i][i] = S(1);
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& [k, mult] : edges[i]) a[k][i] = a[k][i] - S(mult) * inv;
    }
    for (const auto& [k, mult] : level1) rhs[k] = S(mult) * inv;
    const std::vector<S> w = detail::solve(std::move(a), std::move(rhs));

    std::map<S, S> weights;
    for (std::size_t i = 0; i < n; ++i) weights.emplace(keys[i], w[i]);
    PhiResult<S> out;
    out.terms = detail::sorted_terms(std::move(weights));
    out.phi = indicator_sum(s, out.base, out.terms);
    out.mode = DensityMode::Closed;
    return out;
  }
}

/// Partial sums of phi through level N; the tail bound is certified by the growth bound.
template <Scalar S>
PhiResult<S> phi_truncated(const GreedySystem<S>& sys, std::size_t N) {
  KeyEnumerator<S> en(sys);
  std::map<S, S> weights;
  for (std::size_t n = 1; n <= N; ++n) {
    const KeyLevel<S>& lvl = en.advance();
    const S scale = sys.beta().pow(-static_cast<long>(n));
    for (const auto& [t, count] : lvl.counts) {
      auto [it, inserted] = weights.emplace(t, S(0));
      it->second = it->second + ScalarTraits<S>::from_integer(count) * scale;
    }
  }
  PhiResult<S> out;
  out.terms = detail::sorted_terms(std::move(weights));
  out.phi = indicator_sum(sys.support_end(), out.base, out.terms);
  out.mode = DensityMode::Truncated;
  out.depth = N;
  out.tail_sup_bound = kappa_tail(sys, N == 0 ? Integer(1) : en.current().kappa, N);
  return out;
}

/// Truncated phi at the smallest depth whose tail is below rel_tol times the mean of phi.
template <Scalar S>
PhiResult<S> phi_truncated_auto(const GreedySystem<S>& sys, double rel_tol = kDefaultRelativeTail,
                                std::size_t max_depth = kMaxKeyDepth) {
  const GrowthBound g = growth_bound(sys);
  const S series = g.series(sys.beta());
  const S& s = sys.support_end();
  const S tol = ScalarTraits<S>::from_rational(Rational(rel_tol));
  KeyEnumerator<S> en(sys, max_depth);
  std::map<S, S> weights;
  S integral = s;
  S tail{0};
  std::size_t n = 0;
  bool converged = false;
  while (n < max_depth) {
    const KeyLevel<S>& lvl = en.advance();
    ++n;
    const S scale = sys.beta().pow(-static_cast<long>(n));
    for (const auto& [t, count] : lvl.counts) {
      const S w = ScalarTraits<S>::from_integer(count) * scale;
      auto [it, inserted] = weights.emplace(t, S(0));
      it->second = it->second + w;
      integral = integral + w * t;
    }
    tail = ScalarTraits<S>::from_integer(lvl.kappa) * scale * series;
    if (!(tol * integral / s < tail)) {
      converged = true;
      break;
    }
  }
  PhiResult<S> out;
  out.terms = detail::sorted_terms(std::move(weights));
  out.phi = indicator_sum(s, out.base, out.terms);
  out.mode = DensityMode::Truncated;
  out.depth = n;
  out.tail_sup_bound = tail;
  out.converged = converged;
  return out;
}

/// Closed mode when requested (or possible under Auto with the exact backend), else truncated.
/// depth == 0 selects the truncation depth automatically.
template <Scalar S>
PhiResult<S> phi(const GreedySystem<S>& sys, DensityMode mode, std::size_t depth = 0) {
  if (mode == DensityMode::Closed) return phi_closed(sys);
  if (mode == DensityMode::Auto && ScalarTraits<S>::exact) {
    try {
      return phi_closed(sys);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotEventuallyPeriodic) throw;
    }
  }
  if (depth == 0) return phi_truncated_auto(sys);
  return phi_truncated(sys, depth);
}

template <Scalar S>
StepFn<S> normalize(const StepFn<S>& f) {
  const S total = f.integral();
  if (total.sign() <= 0) fail(ErrorKind::ZeroIntegral, "cannot normalize: integral is not positive");
  StepFn<S> out = f.scaled(S(1) / total);
  out.normalized = true;
  return out;
}

/// Transfer operator of T: (Lf)(x) = sum over branches of f((x + a_j)/beta)/beta.
template <Scalar S>
StepFn<S> transfer_apply(const GreedySystem<S>& sys, const StepFn<S>& f) {
  const S& s = sys.support_end();
  const S& beta = sys.beta();
  if (!(f.end() == s)) fail(ErrorKind::OutOfDomain, "function must live on the support");
  std::vector<S> pts{S(0), s};
  std::vector<S> ends;
  for (const Cell<S>& c : sys.cells()) {
    const S& a = sys.digit(c.digit);
    const S e = beta * c.right - a;
    ends.push_back(e);
    if (e < s) pts.push_back(e);
    for (const S& b : f.breakpoints) {
      if (c.left < b && b < c.right) pts.push_back(beta * b - a);
    }
  }
  StepFn<S> out;
  out.breakpoints = sorted_unique(std::move(pts));
  const S inv = S(1) / beta;
  for (std::size_t i = 0; i + 1 < out.breakpoints.size(); ++i) {
    const S mid = (out.breakpoints[i] + out.breakpoints[i + 1]) / S(2);
    S v{0};
    for (std::size_t j = 0; j < sys.cells().size(); ++j) {
      if (!(mid < ends[j])) continue;
      v = v + f((mid + sys.digit(sys.cells()[j].digit)) * inv);
    }
    out.values.push_back(v * inv);
  }
  out.normalized = f.normalized;
  return out;
}

template <Scalar S>
struct ParryOrbit {
  std::vector<S> values;  // T_c^n 1 for n = 0, 1, ...
  std::optional<std::size_t> preperiod;
  std::optional<std::size_t> period;
};

template <Scalar S>
ParryOrbit<S> parry_orbit(const S& beta, std::size_t n_max) {
  ParryOrbit<S> o;
  S x(1);
  std::unordered_map<QuadExt, std::size_t> seen;
  for (std::size_t n = 0; n <= n_max; ++n) {
    o.values.push_back(x);
    if constexpr (ScalarTraits<S>::exact) {
      auto [it, inserted] = seen.emplace(x, n);
      if (!inserted) {
        o.values.pop_back();
        o.preperiod = it->second;
        o.period = n - it->second;
        return o;
      }
    }
    x = classical_step(beta, x).image;
  }
  return o;
}

/// Parry density on [0,1) for the classical map: sum of beta^-n * 1_[0, T_c^n 1).
/// Exact when the orbit of 1 is eventually periodic; truncated otherwise.
template <Scalar S>
PhiResult<S> parry_density(const S& beta, std::size_t depth = 0, double rel_tol = kDefaultRelativeTail) {
  if (!(S(1) < beta)) fail(ErrorKind::OutOfDomain, "beta must exceed 1");
  const S inv = S(1) / beta;
  // Tail after keeping terms n <= N: beta^-N / (beta - 1).
  std::size_t n_max = depth;
  if (n_max == 0) {
    const double b = beta.to_double();
    n_max = static_cast<std::size_t>(std::ceil((-std::log(rel_tol) - std::log(b - 1.0)) / std::log(b))) + 1;
    n_max = std::min<std::size_t>(std::max<std::size_t>(n_max, 1), kMaxKeyDepth);
  }
  const ParryOrbit<S> o = parry_orbit(beta, n_max);
  std::map<S, S> weights;
  auto add = [&](const S& key, const S& w) {
    if (key.sign() <= 0) return;
    auto [it, inserted] = weights.emplace(key, S(0));
    it->second = it->second + w;
  };
  PhiResult<S> out;
  S scale = inv;
  if (o.period) {
    const std::size_t p = *o.preperiod;
    const std::size_t k = *o.period;
    const S cycle = S(1) / (S(1) - beta.pow(-static_cast<long>(k)));
    for (std::size_t n = 1; n < o.values.size(); ++n) {
      add(o.values[n], n >= p ? scale * cycle : scale);
      scale = scale * inv;
    }
    out.mode = DensityMode::Closed;
    // n = 0 term sits in the base when the cycle does not pass through 1.
    if (p == 0) out.base = cycle;
  } else {
    for (std::size_t n = 1; n < o.values.size(); ++n) {
      add(o.values[n], scale);
      scale = scale * inv;
    }
    out.mode = DensityMode::Truncated;
    out.depth = o.values.size() - 1;
    out.tail_sup_bound = beta.pow(-static_cast<long>(out.depth)) / (beta - S(1));
  }
  out.terms = detail::sorted_terms(std::move(weights));
  out.phi = indicator_sum(S(1), out.base, out.terms);
  return out;
}

template <Scalar S>
struct AcimResult {
  StepFn<S> h;            // normalized density on [0, s)
  PhiResult<S> phi;       // unnormalized pieces (classical scale for the Parry route)
  S integral{0};          // integral of the unnormalized density
  S tail_sup_bound{0};    // sup-norm bound on |h - h_exact| scale for truncated modes
  std::string route;      // "parry" or "wilkinson"
};

/// Invariant density of T, routed by support case.
template <Scalar S>
AcimResult<S> acim(const GreedySystem<S>& sys, DensityMode mode = DensityMode::Auto, std::size_t depth = 0) {
  AcimResult<S> out;
  const SupportCase c = sys.support_case();
  if (c == SupportCase::IsoClassical || c == SupportCase::ClassicalComplete) {
    out.route = "parry";
    if (mode == DensityMode::Closed && !ScalarTraits<S>::exact) {
      fail(ErrorKind::ExactBackendRequired, "closed mode needs the exact backend");
    }
    out.phi = parry_density(sys.beta(), depth);
    if (mode == DensityMode::Closed && out.phi.mode != DensityMode::Closed) {
      fail(ErrorKind::NotEventuallyPeriodic, "orbit of 1 is not eventually periodic within the budget");
    }
    // Move from [0,1) to [0,s): h(x) = h_c(x/s)/s.
    const S& s = sys.support_end();
    out.integral = out.phi.phi.integral();
    StepFn<S> hc = normalize(out.phi.phi);
    out.h.normalized = true;
    for (const auto& b : hc.breakpoints) out.h.breakpoints.push_back(b * s);
    for (const auto& v : hc.values) out.h.values.push_back(v / s);
    out.tail_sup_bound = out.phi.tail_sup_bound / (out.integral * s);
    return out;
  }
  out.route = "wilkinson";
  out.phi = phi(sys, mode, depth);
  out.integral = out.phi.phi.integral();
  out.h = normalize(out.phi.phi);
  out.tail_sup_bound = out.phi.tail_sup_bound / out.integral;
  return out;
}

struct BirkhoffOptions {
  std::size_t iterations = 1000000;
  std::size_t bins = 64;
  std::uint64_t seed = 0;
  std::optional<double> start;  // follow one orbit from here instead of restarted segments
  std::size_t burn_in = 32;
  std::size_t segment = 64;
};

struct BirkhoffResult {
  std::vector<double> empirical;  // occupation frequency per bin
  std::vector<double> expected;   // exact density mass per bin
  double l1 = 0.0;                // sum over bins of |empirical - expected|
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
};

/// Occupation histogram of T in binary128 arithmetic against a reference density.
///
/// Without a start point the orbit is cut into segments that restart from
/// uniform points and discard a burn-in, which keeps rounding drift from
/// collapsing the orbit onto a spurious cycle.
inline BirkhoffResult birkhoff_histogram(const GreedySystem<Real>& sys, const StepFn<Real>& density,
                                         const BirkhoffOptions& opt) {
  if (opt.bins < 1 || opt.iterations < 1) fail(ErrorKind::OutOfDomain, "need at least one bin and one iteration");
  using F = Real::Float;
  const F s = sys.support_end().value();
  const F beta = sys.beta().value();
  std::vector<F> edges;
  std::vector<F> digits;
  for (const auto& c : sys.cells()) {
    edges.push_back(c.left.value());
    digits.push_back(sys.digit(c.digit).value());
  }
  const double sd = sys.support_end().to_double();
  const double bin_width = sd / static_cast<double>(opt.bins);

  BirkhoffResult r;
  r.seed = opt.seed;
  r.iterations = opt.iterations;
  std::vector<std::uint64_t> counts(opt.bins, 0);
  std::mt19937_64 rng(opt.seed);
  // Restart points carry 128 random bits: a 53-bit double collapses under integer-beta doubling.
  const F two64 = boost::multiprecision::ldexp(F(1), 64);
  auto unif = [&] { return (F(rng()) + F(rng()) / two64) / two64; };

  auto step = [&](F& x) {
    std::size_t j = 0;
    for (std::size_t k = 1; k < edges.size(); ++k) {
      if (x >= edges[k]) j = k;
    }
    x = beta * x - digits[j];
    if (x < 0) x = 0;
    if (x >= s) x = s * F(0.999999999999);
  };
  auto record = [&](const F& x) {
    auto b = static_cast<std::size_t>(x.convert_to<double>() / bin_width);
    counts[std::min(b, opt.bins - 1)] += 1;
  };

  F x = opt.start ? F(*opt.start) : F(0);
  std::size_t recorded = 0;
  while (recorded < opt.iterations) {
    if (!opt.start) {
      x = unif() * s;
      for (std::size_t i = 0; i < opt.burn_in; ++i) step(x);
    }
    const std::size_t len = opt.start ? opt.iterations : std::min(opt.segment, opt.iterations - recorded);
    for (std::size_t i = 0; i < len; ++i) {
      record(x);
      step(x);
    }
    recorded += len;
  }
  for (std::size_t b = 0; b < opt.bins; ++b) {
    const double emp = static_cast<double>(counts[b]) / static_cast<double>(opt.iterations);
    const Real lo(F(bin_width * static_cast<double>(b)));
    const Real hi = b + 1 == opt.bins ? sys.support_end() : Real(F(bin_width * static_cast<double>(b + 1)));
    const double exp = density.integral(lo, hi).to_double();
    r.empirical.push_back(emp);
    r.expected.push_back(exp);
    r.l1 += std::abs(emp - exp);
  }
  return r;
}

/// Independent seeds run on up to `jobs` threads; results come back in seed order.
inline std::vector<BirkhoffResult> birkhoff_runs(const GreedySystem<Real>& sys, const StepFn<Real>& density,
                                                 BirkhoffOptions opt, const std::vector<std::uint64_t>& seeds,
                                                 unsigned jobs) {
  std::vector<BirkhoffResult> out(seeds.size());
  jobs = std::max(1u, jobs);
  for (std::size_t first = 0; first < seeds.size(); first += jobs) {
    std::vector<std::thread> pool;
    for (std::size_t i = first; i < std::min(seeds.size(), first + jobs); ++i) {
      pool.emplace_back([&, i] {
        BirkhoffOptions o = opt;
        o.seed = seeds[i];
        out[i] = birkhoff_histogram(sys, density, o);
      });
    }
    for (auto& t : pool) t.join();
  }
  return out;
}

inline std::string_view to_string(DensityMode m) {
  switch (m) {
    case DensityMode::Auto: return "auto";
    case DensityMode::Closed: return "closed";
    case DensityMode::Truncated: return "truncated";
  }
  return "unknown";
}

}  // namespace betadd
