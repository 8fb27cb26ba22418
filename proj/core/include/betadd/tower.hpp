#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "betadd/density.hpp"
#include "betadd/error.hpp"
#include "betadd/intervals.hpp"
#include "betadd/scalar.hpp"
#include "betadd/system.hpp"

namespace betadd {

inline constexpr std::size_t kDefaultReturnBudget = 10000;
inline constexpr std::size_t kFullTarget = static_cast<std::size_t>(-1);

/// One rectangle [0, x_end) x [0, height) of the tower.
template <Scalar S>
struct Rect {
  std::size_t n = 0;
  std::size_t i = 0;  // 1-based within level n; R0 is (0, 0)
  Word word;
  S x_end;
  S height;
  S word_left;  // left end of the word's cylinder, the y-offset of its full children
  std::vector<std::size_t> targets;  // per cell: 1-based child index at n+1, or kFullTarget
};

template <Scalar S>
struct Interval {
  S lo;
  S hi;
  std::optional<S> exact;
};

template <Scalar S>
struct Tower {
  std::shared_ptr<const GreedySystem<S>> sys;  // owned copy, so towers outlive their inputs
  std::size_t depth = 0;
  Rect<S> r0;
  std::vector<std::vector<Rect<S>>> levels;  // levels[n-1] holds R_(n, .)
  S R0_side;
  S lambda_R_truncated;
  S tail_bound;
  std::optional<S> lambda_R_closed;
  std::optional<PhiResult<S>> closed_phi;

  const Rect<S>& rect(std::size_t n, std::size_t i) const {
    if (n == 0) {
      if (i != 0) fail(ErrorKind::InvalidPoint, "R0 has index 0");
      return r0;
    }
    if (n > levels.size() || i < 1 || i > levels[n - 1].size()) {
      fail(ErrorKind::InvalidPoint, "no rectangle (" + std::to_string(n) + ", " + std::to_string(i) + ")");
    }
    return levels[n - 1][i - 1];
  }

  std::size_t rect_count() const {
    std::size_t k = 1;
    for (const auto& l : levels) k += l.size();
    return k;
  }

  Interval<S> lambda_R() const { return {lambda_R_truncated, lambda_R_truncated + tail_bound, lambda_R_closed}; }
};

template <Scalar S>
struct TowerPoint {
  S x;
  S y;
  std::size_t n = 0;
  std::size_t i = 0;
  friend bool operator==(const TowerPoint&, const TowerPoint&) = default;
};

namespace detail {

template <Scalar S>
std::vector<std::size_t> fill_targets(const GreedySystem<S>& sys, const S& t) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < sys.cells().size(); ++j) {
    auto end = branch_end(sys, t, j);
    if (!end) break;
    out.push_back(*end == sys.support_end() ? kFullTarget : 0);
  }
  return out;
}

}  // namespace detail

template <Scalar S>
Tower<S> build_tower(const GreedySystem<S>& sys, std::size_t N) {
  if (sys.support_case() != SupportCase::MainCase) fail(ErrorKind::WrongCase, "tower needs MainCase");
  if (N > kMaxWordDepth) fail(ErrorKind::DepthExceeded, "tower depth is capped at " + std::to_string(kMaxWordDepth));
  const S& s = sys.support_end();
  Tower<S> tw;
  tw.sys = std::make_shared<const GreedySystem<S>>(sys);
  tw.depth = N;
  tw.R0_side = s;
  tw.r0.x_end = s;
  tw.r0.height = s;
  tw.r0.word_left = S(0);
  tw.r0.targets = detail::fill_targets(sys, s);

  IntervalTree<S> tree(sys);
  for (std::size_t n = 1; n <= N; ++n) {
    const LevelSets<S>& lvl = tree.advance();
    std::vector<Rect<S>> rects;
    const S height = s * sys.beta().pow(-static_cast<long>(n));
    for (std::size_t k = 0; k < lvl.B.size(); ++k) {
      const FundInterval<S>& b = lvl.B[k];
      Rect<S> r;
      r.n = n;
      r.i = k + 1;
      r.word = b.word;
      r.x_end = b.image_end;
      r.height = height;
      r.word_left = b.left;
      r.targets = detail::fill_targets(sys, b.image_end);
      Rect<S>& parent = n == 1 ? tw.r0 : tw.levels[n - 2][b.parent];
      parent.targets[b.cell] = k + 1;
      rects.push_back(std::move(r));
    }
    tw.levels.push_back(std::move(rects));
  }

  S total = s * s;
  for (const auto& lvl : tw.levels) {
    for (const auto& r : lvl) total = total + r.x_end * r.height;
  }
  tw.lambda_R_truncated = total;
  const Integer kappa_N = N == 0 ? Integer(1) : Integer(static_cast<unsigned long>(tw.levels.back().size()));
  tw.tail_bound = s * s * kappa_tail(sys, kappa_N, N);

  if constexpr (ScalarTraits<S>::exact) {
    try {
      PhiResult<S> closed = phi_closed(sys);
      tw.lambda_R_closed = s * closed.phi.integral();
      tw.closed_phi = std::move(closed);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotEventuallyPeriodic) throw;
    }
  }
  return tw;
}

/// The tower map: expands x by beta, contracts y by beta, and moves between rectangles.
template <Scalar S>
TowerPoint<S> tee_step(const Tower<S>& tw, const TowerPoint<S>& p) {
  const GreedySystem<S>& sys = *tw.sys;
  const Rect<S>& r = tw.rect(p.n, p.i);
  if (p.x.sign() < 0 || !(p.x < r.x_end) || p.y.sign() < 0 || !(p.y < r.height)) {
    fail(ErrorKind::InvalidPoint, "point lies outside its rectangle");
  }
  if constexpr (ScalarTraits<S>::exact) {
    if (sys.on_boundary(p.x)) fail(ErrorKind::BoundaryPoint, "x sits on a cell boundary");
  }
  const std::size_t j = sys.cell_of(p.x);
  const S& a = sys.digit(sys.cells()[j].digit);
  const S& beta = sys.beta();
  TowerPoint<S> q;
  q.x = beta * p.x - a;
  const std::size_t target = r.targets[j];
  if (target == kFullTarget) {
    // Re-enter R0 inside the band of the completed full word.
    q.y = r.word_left + a * beta.pow(-static_cast<long>(p.n + 1)) + p.y / beta;
    q.n = 0;
    q.i = 0;
    return q;
  }
  if (p.n + 1 > tw.depth) fail(ErrorKind::DepthExceeded, "orbit climbed above the tower depth");
  q.y = p.y / beta;
  q.n = p.n + 1;
  q.i = target;
  return q;
}

template <Scalar S>
struct Band {
  S lo;
  S hi;
  Word word;
};

template <Scalar S>
struct MeasureReport {
  std::size_t rects_checked = 0;
  std::size_t rects_balanced = 0;
  S max_residual{0};
  bool bands_disjoint = true;
  std::vector<Band<S>> bands;  // R0 y-bands written by full transitions, sorted

  bool ok() const { return rects_checked == rects_balanced && bands_disjoint && max_residual.sign() == 0; }
};

/// Checks that every rectangle at level <= n_max splits into images of equal total area,
/// each image exactly filling its target, and that the R0 bands are pairwise disjoint.
template <Scalar S>
MeasureReport<S> check_measure_preservation(const Tower<S>& tw, std::size_t n_max) {
  if (n_max + 1 > tw.depth) fail(ErrorKind::DepthExceeded, "tower must be built to n_max + 1");
  const GreedySystem<S>& sys = *tw.sys;
  const S& s = sys.support_end();
  const S& beta = sys.beta();
  MeasureReport<S> rep;
  auto check = [&](const Rect<S>& r) {
    S image_area{0};
    bool targets_ok = true;
    for (std::size_t j = 0; j < r.targets.size(); ++j) {
      const Cell<S>& c = sys.cells()[j];
      const S& a = sys.digit(c.digit);
      const S piece_w = smin(r.x_end, c.right) - c.left;
      const S img_w = beta * smin(r.x_end, c.right) - a;
      const S img_h = r.height / beta;
      if (!(beta * piece_w == img_w)) targets_ok = false;
      image_area = image_area + img_w * img_h;
      if (r.targets[j] == kFullTarget) {
        if (!(img_w == s)) targets_ok = false;
        Band<S> b;
        b.lo = r.word_left + a * beta.pow(-static_cast<long>(r.n + 1));
        b.hi = b.lo + img_h;
        b.word = r.word;
        b.word.symbols.push_back(static_cast<std::uint8_t>(c.digit));
        rep.bands.push_back(std::move(b));
      } else {
        const Rect<S>& t = tw.rect(r.n + 1, r.targets[j]);
        if (!(t.x_end == img_w) || !(t.height == img_h)) targets_ok = false;
      }
    }
    S residual = r.x_end * r.height - image_area;
    if (residual.sign() < 0) residual = -residual;
    rep.max_residual = smax(rep.max_residual, residual);
    ++rep.rects_checked;
    if (targets_ok && residual.sign() == 0) ++rep.rects_balanced;
  };
  check(tw.r0);
  for (std::size_t n = 1; n <= n_max; ++n) {
    for (const auto& r : tw.levels[n - 1]) check(r);
  }
  std::sort(rep.bands.begin(), rep.bands.end(), [](const Band<S>& x, const Band<S>& y) { return x.lo < y.lo; });
  for (std::size_t k = 1; k < rep.bands.size(); ++k) {
    if (rep.bands[k].lo < rep.bands[k - 1].hi) rep.bands_disjoint = false;
  }
  return rep;
}

/// Ranks at which the digit prefix of x completes its first k full blocks.
template <Scalar S>
std::vector<std::size_t> return_times(const GreedySystem<S>& sys, const S& x, std::size_t k,
                                      std::size_t budget = kDefaultReturnBudget) {
  if (x.sign() < 0 || !(x < sys.support_end())) fail(ErrorKind::OutOfDomain, "x must lie in [0, s)");
  if (k < 1) fail(ErrorKind::OutOfDomain, "need k >= 1");
  std::vector<std::size_t> out;
  S t = sys.support_end();
  S cur = x;
  for (std::size_t rank = 1; rank <= budget; ++rank) {
    const std::size_t j = sys.cell_of(cur);
    t = *branch_end(sys, t, j);
    cur = sys.apply(cur, sys.cells()[j].digit);
    if (t == sys.support_end()) {
      out.push_back(rank);
      if (out.size() == k) return out;
    }
  }
  fail(ErrorKind::OrbitBudgetExceeded, "return not completed within " + std::to_string(budget) + " steps");
}

template <Scalar S>
struct InducedPoint {
  S x;
  S y;
  std::size_t r1 = 0;
};

/// First-return map of the tower map to R0.
template <Scalar S>
InducedPoint<S> induced_map(const Tower<S>& tw, const S& x, const S& y) {
  TowerPoint<S> p{x, y, 0, 0};
  for (std::size_t step = 1; step <= tw.depth + 1; ++step) {
    p = tee_step(tw, p);
    if (p.n == 0) return {p.x, p.y, step};
  }
  fail(ErrorKind::OrbitBudgetExceeded, "no return to R0 within the tower depth");
}

template <Scalar S>
struct ExactnessConstants {
  Interval<S> c1;
  Interval<S> c2;
  Interval<S> gamma;
};

template <Scalar S>
ExactnessConstants<S> exactness_constants(const Tower<S>& tw) {
  const GreedySystem<S>& sys = *tw.sys;
  const S& s = sys.support_end();
  const S& a1 = sys.digit(1);
  ExactnessConstants<S> out;
  // c2 = 1 + sum over n of kappa(n) / beta^n
  S c2_lo(1);
  for (std::size_t n = 1; n <= tw.depth; ++n) {
    c2_lo = c2_lo + S(static_cast<long>(tw.levels[n - 1].size())) * sys.beta().pow(-static_cast<long>(n));
  }
  const S c2_hi = c2_lo + tw.tail_bound / (s * s);
  const Interval<S> lam = tw.lambda_R();
  out.c1 = {a1 / lam.hi, a1 / lam.lo, std::nullopt};
  out.c2 = {c2_lo, c2_hi, std::nullopt};
  if (tw.lambda_R_closed && tw.closed_phi) {
    S c2(1);
    for (const auto& [key, w] : tw.closed_phi->terms) c2 = c2 + w;
    const S c1 = a1 / *tw.lambda_R_closed;
    out.c1 = {c1, c1, c1};
    out.c2 = {c2, c2, c2};
  }
  out.gamma = {out.c1.lo * out.c2.lo * out.c2.lo * a1, out.c1.hi * out.c2.hi * out.c2.hi * a1, std::nullopt};
  if (out.c1.exact && out.c2.exact) out.gamma.exact = out.gamma.lo;
  return out;
}

/// Total height of the rectangles whose x-interval is [0, key), summed in closed form.
template <Scalar S>
S closed_height(const Tower<S>& tw, const S& key) {
  if (!tw.closed_phi) fail(ErrorKind::NotEventuallyPeriodic, "no closed form for this tower");
  for (const auto& [k, w] : tw.closed_phi->terms) {
    if (k == key) return tw.sys->support_end() * w;
  }
  return S(0);
}

template <Scalar S>
S truncated_height(const Tower<S>& tw, const S& key) {
  S total{0};
  for (const auto& lvl : tw.levels) {
    for (const auto& r : lvl) {
      if (r.x_end == key) total = total + r.height;
    }
  }
  return total;
}

}  // namespace betadd
