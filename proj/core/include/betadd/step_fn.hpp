#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "betadd/error.hpp"
#include "betadd/scalar.hpp"

namespace betadd {

/// Piecewise-constant function on [0, end): value i holds on [bp_i, bp_{i+1}).
template <Scalar S>
struct StepFn {
  std::vector<S> breakpoints;
  std::vector<S> values;
  bool normalized = false;

  static StepFn constant(const S& end, const S& value) {
    return StepFn{{S(0), end}, {value}, false};
  }

  const S& end() const { return breakpoints.back(); }
  std::size_t pieces() const { return values.size(); }
  Backend backend() const { return ScalarTraits<S>::backend; }

  S integral() const {
    S total{0};
    for (std::size_t i = 0; i < values.size(); ++i) total = total + values[i] * (breakpoints[i + 1] - breakpoints[i]);
    return total;
  }

  /// Integral over [a, b) intersected with the domain.
  S integral(const S& a, const S& b) const {
    S total{0};
    for (std::size_t i = 0; i < values.size(); ++i) {
      const S lo = smax(a, breakpoints[i]);
      const S hi = smin(b, breakpoints[i + 1]);
      if (lo < hi) total = total + values[i] * (hi - lo);
    }
    return total;
  }

  std::size_t piece_of(const S& x) const {
    if (x.sign() < 0 || !(x < end())) fail(ErrorKind::OutOfDomain, "step function evaluated outside its domain");
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x,
                               [](const S& a, const S& b) { return a < b; });
    return static_cast<std::size_t>(it - breakpoints.begin()) - 1;
  }

  const S& operator()(const S& x) const { return values[piece_of(x)]; }

  StepFn scaled(const S& c) const {
    StepFn out = *this;
    for (auto& v : out.values) v = v * c;
    out.normalized = false;
    return out;
  }

  /// Merges neighbouring pieces with equal values.
  StepFn canonical() const {
    StepFn out;
    out.normalized = normalized;
    out.breakpoints.push_back(breakpoints.front());
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!out.values.empty() && out.values.back() == values[i]) {
        out.breakpoints.back() = breakpoints[i + 1];
      } else {
        out.values.push_back(values[i]);
        out.breakpoints.push_back(breakpoints[i + 1]);
      }
    }
    return out;
  }

  S sup_abs() const {
    S best{0};
    for (const auto& v : values) best = smax(best, v.sign() < 0 ? -v : v);
    return best;
  }
};

template <Scalar S>
std::vector<S> sorted_unique(std::vector<S> pts) {
  std::sort(pts.begin(), pts.end(), [](const S& a, const S& b) { return a < b; });
  std::vector<S> out;
  for (auto& p : pts) {
    if (out.empty() || !(out.back() == p)) out.push_back(std::move(p));
  }
  return out;
}

/// Pointwise op(a, b) on the common refinement of both breakpoint sets.
template <Scalar S, class Op>
StepFn<S> combine(const StepFn<S>& a, const StepFn<S>& b, Op op) {
  if (!(a.end() == b.end())) fail(ErrorKind::OutOfDomain, "step functions live on different intervals");
  std::vector<S> pts = a.breakpoints;
  pts.insert(pts.end(), b.breakpoints.begin(), b.breakpoints.end());
  StepFn<S> out;
  out.breakpoints = sorted_unique(std::move(pts));
  for (std::size_t i = 0; i + 1 < out.breakpoints.size(); ++i) {
    const S mid = (out.breakpoints[i] + out.breakpoints[i + 1]) / S(2);
    out.values.push_back(op(a(mid), b(mid)));
  }
  return out;
}

template <Scalar S>
StepFn<S> operator-(const StepFn<S>& a, const StepFn<S>& b) {
  return combine(a, b, [](const S& x, const S& y) { return x - y; });
}

template <Scalar S>
StepFn<S> operator+(const StepFn<S>& a, const StepFn<S>& b) {
  return combine(a, b, [](const S& x, const S& y) { return x + y; });
}

template <Scalar S>
S sup_distance(const StepFn<S>& a, const StepFn<S>& b) {
  return (a - b).sup_abs();
}

/// base * 1_[0,end) + sum of w * 1_[0,t) over the given terms.
template <Scalar S>
StepFn<S> indicator_sum(const S& end, const S& base, const std::vector<std::pair<S, S>>& terms) {
  std::vector<std::pair<S, S>> sorted;
  for (const auto& [t, w] : terms) {
    if (t.sign() <= 0) continue;
    if (end < t) fail(ErrorKind::OutOfDomain, "indicator extends past the domain");
    sorted.emplace_back(t, w);
  }
  std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) { return y.first < x.first; });
  // Walk right to left, accumulating weights of indicators that cover each gap.
  std::vector<S> bps{end};
  std::vector<S> vals;
  S acc = base;
  for (const auto& [t, w] : sorted) {
    if (t == bps.back()) {
      acc = acc + w;
      continue;
    }
    vals.push_back(acc);
    bps.push_back(t);
    acc = acc + w;
  }
  vals.push_back(acc);
  bps.push_back(S(0));
  std::reverse(bps.begin(), bps.end());
  std::reverse(vals.begin(), vals.end());
  return StepFn<S>{std::move(bps), std::move(vals), false};
}

template <Scalar To, Scalar From>
StepFn<To> convert(const StepFn<From>& f) {
  StepFn<To> out;
  out.normalized = f.normalized;
  for (const auto& b : f.breakpoints) out.breakpoints.push_back(ScalarTraits<To>::from(b));
  for (const auto& v : f.values) out.values.push_back(ScalarTraits<To>::from(v));
  return out;
}

}  // namespace betadd
