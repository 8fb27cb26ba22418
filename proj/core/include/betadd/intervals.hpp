#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "betadd/error.hpp"
#include "betadd/scalar.hpp"
#include "betadd/system.hpp"

namespace betadd {

inline constexpr std::size_t kMaxWordDepth = 64;
inline constexpr std::size_t kMaxKeyDepth = 512;
inline constexpr std::size_t kDefaultNodeBudget = std::size_t{1} << 21;
inline constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

/// Image of the branch through cell j of a node whose image is [0, t).
/// Empty when the cell starts at or beyond t.
template <Scalar S>
std::optional<S> branch_end(const GreedySystem<S>& sys, const S& t, std::size_t j) {
  const Cell<S>& c = sys.cells()[j];
  if (!(c.left < t)) return std::nullopt;
  return sys.beta() * smin(t, c.right) - sys.digit(c.digit);
}

template <Scalar S>
struct FundInterval {
  Word word;
  std::size_t level = 0;
  S left;
  S right;
  S image_end;
  bool full = false;
  std::size_t parent = kNoParent;  // index into the previous level's B list
  std::size_t cell = 0;            // cell taken at the last step
};

template <Scalar S>
struct LevelSets {
  std::size_t n = 0;
  std::vector<FundInterval<S>> B;  // non-full, not inside a lower-rank full interval
  std::vector<FundInterval<S>> D;  // full intervals born at this rank
  S D_measure{0};
  std::uint64_t kappa = 0;
  std::uint64_t kappa1 = 0;
  std::uint64_t kappa2 = 0;
  std::uint64_t kappa_bar = 0;
};

/// rank-1 cells with their digits
template <Scalar S>
std::vector<Cell<S>> level_partition(const GreedySystem<S>& sys) {
  const SupportCase c = sys.support_case();
  if (c != SupportCase::MainCase && c != SupportCase::BigSecondGap && c != SupportCase::TopCellFull &&
      c != SupportCase::Wilkinson) {
    fail(ErrorKind::WrongCase, "level partition needs a deleted-digit support case");
  }
  return sys.cells();
}

/// Breadth-first word-level tree of fundamental intervals.
template <Scalar S>
class IntervalTree {
 public:
  explicit IntervalTree(const GreedySystem<S>& sys, std::size_t node_budget = kDefaultNodeBudget)
      : sys_(sys), budget_(node_budget) {
    root_.level = 0;
    root_.left = S(0);
    root_.right = sys.support_end();
    root_.image_end = sys.support_end();
    root_.full = true;
  }

  std::size_t depth() const { return levels_.size(); }
  const LevelSets<S>& level(std::size_t n) const { return levels_.at(n - 1); }
  const std::vector<LevelSets<S>>& levels() const { return levels_; }

  const LevelSets<S>& advance() {
    const std::size_t n = levels_.size() + 1;
    if (n > kMaxWordDepth) {
      fail(ErrorKind::DepthExceeded, "word-level depth is capped at " + std::to_string(kMaxWordDepth));
    }
    const GreedySystem<S>& sys = sys_;
    const S& s = sys.support_end();
    const S scale = sys.beta().pow(-static_cast<long>(n - 1));

    LevelSets<S> next;
    next.n = n;
    std::vector<const FundInterval<S>*> parents;
    if (n == 1) {
      parents.push_back(&root_);
    } else {
      for (const auto& b : levels_.back().B) parents.push_back(&b);
    }
    for (std::size_t pi = 0; pi < parents.size(); ++pi) {
      const FundInterval<S>& p = *parents[pi];
      for (std::size_t j = 0; j < sys.cells().size(); ++j) {
        auto end = branch_end(sys, p.image_end, j);
        if (!end) break;
        const Cell<S>& c = sys.cells()[j];
        FundInterval<S> child;
        child.word = p.word;
        child.word.symbols.push_back(static_cast<std::uint8_t>(c.digit));
        child.level = n;
        child.left = p.left + c.left * scale;
        child.right = p.left + smin(p.image_end, c.right) * scale;
        child.full = *end == s;
        child.image_end = std::move(*end);
        child.parent = n == 1 ? kNoParent : pi;
        child.cell = j;
        if (child.full) {
          next.D.push_back(std::move(child));
        } else {
          if (child.word.symbols.front() == 1) ++next.kappa1;
          if (child.word.symbols.front() == 2) ++next.kappa2;
          next.B.push_back(std::move(child));
        }
        if (next.B.size() + next.D.size() > budget_) {
          fail(ErrorKind::DepthExceeded, "interval tree exceeded its node budget at level " + std::to_string(n));
        }
      }
    }
    next.kappa = next.B.size();
    next.D_measure = S(static_cast<long>(next.D.size())) * s * sys.beta().pow(-static_cast<long>(n));
    for (const auto& b : next.B) {
      std::size_t nonfull = 0;
      for (std::size_t j = 0; j < sys.cells().size(); ++j) {
        auto end = branch_end(sys, b.image_end, j);
        if (!end) break;
        if (!(*end == s)) ++nonfull;
      }
      if (nonfull >= 2) ++next.kappa_bar;
    }
    levels_.push_back(std::move(next));
    return levels_.back();
  }

 private:
  GreedySystem<S> sys_;
  std::size_t budget_;
  FundInterval<S> root_;
  std::vector<LevelSets<S>> levels_;
};

template <Scalar S>
std::vector<LevelSets<S>> refine_to(const GreedySystem<S>& sys, std::size_t N,
                                    std::size_t node_budget = kDefaultNodeBudget) {
  if (N < 1) fail(ErrorKind::OutOfDomain, "depth must be at least 1");
  IntervalTree<S> tree(sys, node_budget);
  for (std::size_t n = 1; n <= N; ++n) tree.advance();
  return tree.levels();
}

/// Per-level counts aggregated by exact image end; scales to depths the word tree cannot reach.
template <Scalar S>
struct KeyLevel {
  std::size_t n = 0;
  std::map<S, Integer> counts;  // image end -> number of B_n intervals
  Integer kappa{0};
  Integer kappa1{0};
  Integer kappa2{0};
  Integer kappa_bar{0};
  Integer full_count{0};
};

template <Scalar S>
class KeyEnumerator {
 public:
  explicit KeyEnumerator(const GreedySystem<S>& sys, std::size_t max_depth = kMaxKeyDepth)
      : sys_(sys), max_depth_(max_depth) {}

  std::size_t depth() const { return depth_; }
  const KeyLevel<S>& current() const { return current_; }

  const KeyLevel<S>& advance() {
    if (depth_ + 1 > max_depth_) {
      fail(ErrorKind::DepthExceeded, "aggregated depth is capped at " + std::to_string(max_depth_));
    }
    const GreedySystem<S>& sys = sys_;
    const S& s = sys.support_end();
    std::map<std::pair<std::size_t, S>, Integer> next;
    KeyLevel<S> lvl;
    lvl.n = ++depth_;
    auto expand = [&](std::size_t first, const S& t, const Integer& count, bool root) {
      for (std::size_t j = 0; j < sys.cells().size(); ++j) {
        auto end = branch_end(sys, t, j);
        if (!end) break;
        if (*end == s) {
          lvl.full_count += count;
        } else {
          const std::size_t f = root ? sys.cells()[j].digit : first;
          next[{f, std::move(*end)}] += count;
        }
      }
    };
    if (depth_ == 1) {
      expand(0, s, Integer(1), true);
    } else {
      for (const auto& [key, count] : state_) expand(key.first, key.second, count, false);
    }
    for (const auto& [key, count] : next) {
      lvl.counts[key.second] += count;
      lvl.kappa += count;
      if (key.first == 1) lvl.kappa1 += count;
      if (key.first == 2) lvl.kappa2 += count;
    }
    for (const auto& [t, count] : lvl.counts) {
      if (nonfull_children(t) >= 2) lvl.kappa_bar += count;
    }
    state_ = std::move(next);
    current_ = std::move(lvl);
    return current_;
  }

  std::size_t nonfull_children(const S& t) const {
    std::size_t k = 0;
    for (std::size_t j = 0; j < sys_.cells().size(); ++j) {
      auto end = branch_end(sys_, t, j);
      if (!end) break;
      if (!(*end == sys_.support_end())) ++k;
    }
    return k;
  }

 private:
  GreedySystem<S> sys_;
  std::size_t max_depth_;
  std::size_t depth_ = 0;
  std::map<std::pair<std::size_t, S>, Integer> state_;
  KeyLevel<S> current_;
};

template <Scalar S>
struct KappaRow {
  std::size_t n = 0;
  Integer kappa{0};
  Integer kappa1{0};
  Integer kappa2{0};
  Integer kappa_bar{0};
  S D_measure{0};
};

/// Exact kappa statistics per level; asserts kappa(n+1) = kappa(n) + kappa_bar(n) in the main case.
template <Scalar S>
std::vector<KappaRow<S>> kappa_table(const GreedySystem<S>& sys, std::size_t N) {
  if (N < 1) fail(ErrorKind::OutOfDomain, "depth must be at least 1");
  if (N > kMaxWordDepth) fail(ErrorKind::DepthExceeded, "kappa depth is capped at " + std::to_string(kMaxWordDepth));
  KeyEnumerator<S> en(sys);
  std::vector<KappaRow<S>> rows;
  for (std::size_t n = 1; n <= N; ++n) {
    const KeyLevel<S>& lvl = en.advance();
    KappaRow<S> row;
    row.n = n;
    row.kappa = lvl.kappa;
    row.kappa1 = lvl.kappa1;
    row.kappa2 = lvl.kappa2;
    row.kappa_bar = lvl.kappa_bar;
    row.D_measure = ScalarTraits<S>::from_integer(lvl.full_count) * sys.support_end() *
                    sys.beta().pow(-static_cast<long>(n));
    rows.push_back(std::move(row));
  }
  if (sys.support_case() == SupportCase::MainCase) {
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      if (rows[i + 1].kappa != rows[i].kappa + rows[i].kappa_bar) {
        fail(ErrorKind::WrongCase, "kappa recursion violated at n = " + std::to_string(rows[i].n));
      }
    }
  }
  return rows;
}

/// Fibonacci numbers with F(1) = F(2) = 1.
inline Integer fibonacci(long n) {
  Integer out;
  if (n <= 0) return Integer(0);
  mpz_fib_ui(out.get_mpz_t(), static_cast<unsigned long>(n));
  return out;
}

/// Binet's formula evaluated exactly in Q(sqrt 5).
inline Integer fibonacci_closed_form(long n) {
  const QuadExt g = constants::golden();
  const QuadExt v = (g.pow(n) - (QuadExt(1) - g).pow(n)) / QuadExt::make(0, 1, 5);
  if (!v.is_rational() || v.p().get_den() != 1) fail(ErrorKind::WrongCase, "Binet value is not an integer");
  return v.p().get_num();
}

/// How fast the number of B_n descendants of one node can grow.
enum class GrowthKind {
  Unit,       // one descendant per level (classical maps)
  Blocked,    // 2^ceil(k/(m+1)) once the first m iterates of both critical points stay in Delta(0)
  Fibonacci,  // F(k+2), second gap avoids the top cell
  Branching,  // b^k with b the maximal number of non-full children
};

inline std::string_view to_string(GrowthKind k);

struct GrowthBound {
  GrowthKind kind = GrowthKind::Branching;
  long m = 0;  // block parameter for Blocked, branching factor for Branching

  /// Upper bound on descendants k levels below a single node.
  Integer at(long k) const {
    if (k <= 0) return Integer(1);
    switch (kind) {
      case GrowthKind::Unit: return Integer(1);
      case GrowthKind::Fibonacci: return fibonacci(k + 2);
      case GrowthKind::Blocked: {
        Integer out;
        mpz_ui_pow_ui(out.get_mpz_t(), 2, static_cast<unsigned long>((k + m) / (m + 1)));
        return out;
      }
      case GrowthKind::Branching: {
        Integer out;
        mpz_ui_pow_ui(out.get_mpz_t(), static_cast<unsigned long>(m), static_cast<unsigned long>(k));
        return out;
      }
    }
    return Integer(0);
  }

  /// Sum over k >= 1 of at(k) / beta^k, in closed form; fails when it diverges.
  template <Scalar S>
  S series(const S& beta) const {
    const S x = S(1) / beta;
    switch (kind) {
      case GrowthKind::Unit: return x / (S(1) - x);
      case GrowthKind::Fibonacci: {
        if (!(S(1) < x + x * x)) {
          return (x / (S(1) - x - x * x) - x - x * x) / (x * x);
        }
        break;
      }
      case GrowthKind::Blocked: {
        S block{0};
        S pw = x;
        for (long i = 0; i <= m; ++i) {
          block = block + pw;
          if (i < m) pw = pw * x;
        }
        // pw = x^(m+1)
        if (S(2) * pw < S(1)) return S(2) * block / (S(1) - S(2) * pw);
        break;
      }
      case GrowthKind::Branching: {
        const S b = S(m) * x;
        if (b < S(1)) return b / (S(1) - b);
        break;
      }
    }
    fail(ErrorKind::Unsupported, "descendant growth is not dominated by beta; no certified tail");
  }
};

/// Picks the sharpest growth bound whose hypothesis the system verifiably satisfies.
template <Scalar S>
GrowthBound growth_bound(const GreedySystem<S>& sys) {
  switch (sys.support_case()) {
    case SupportCase::IsoClassical:
    case SupportCase::ClassicalComplete:
      return {GrowthKind::Unit, 1};
    case SupportCase::MainCase: {
      const LemmaReport rep = verify_lemmas(sys);
      const S& beta = sys.beta();
      const long m = small_beta_exponent(beta);
      const bool golden_ok = rep.checks[1].applicable && rep.checks[1].passed;
      const bool small_ok = m < 2 || (rep.checks[2].applicable && rep.checks[2].passed);
      if (at_most_golden(beta) && golden_ok && small_ok) return {GrowthKind::Blocked, std::max(1L, m)};
      if (rep.checks[0].applicable && rep.checks[0].passed) return {GrowthKind::Fibonacci, 0};
      return {GrowthKind::Branching, 2};
    }
    case SupportCase::BigSecondGap:
    case SupportCase::TopCellFull:
      return {GrowthKind::Branching, 2};
    case SupportCase::Wilkinson:
      return {GrowthKind::Branching, static_cast<long>(sys.digit_count())};
  }
  return {GrowthKind::Branching, static_cast<long>(sys.digit_count())};
}

/// Certified bound on sum over n > N of kappa(n)/beta^n, given kappa(N).
template <Scalar S>
S kappa_tail(const GreedySystem<S>& sys, const Integer& kappa_N, std::size_t N) {
  const GrowthBound g = growth_bound(sys);
  return ScalarTraits<S>::from_integer(kappa_N) * sys.beta().pow(-static_cast<long>(N)) * g.series(sys.beta());
}

struct BoundCheck {
  std::string name;
  Integer bound{0};
  bool ok = false;
};

struct KappaBoundRow {
  std::size_t n = 0;
  Integer kappa{0};
  Integer kappa1{0};
  Integer kappa2{0};
  Integer kappa_bar{0};
  std::vector<BoundCheck> checks;
  bool recursion_ok = true;

  bool ok() const {
    if (!recursion_ok) return false;
    for (const auto& c : checks) {
      if (!c.ok) return false;
    }
    return true;
  }
  /// Tightest applicable bound on kappa(n), or -1 when none applies.
  Integer tightest() const {
    Integer best(-1);
    for (const auto& c : checks) {
      if (c.name.rfind("kappa<=", 0) == 0 && (best < 0 || c.bound < best)) best = c.bound;
    }
    return best;
  }
};

struct KappaBoundReport {
  std::vector<KappaBoundRow> rows;
  bool fibonacci_closed_form_ok = true;
  std::vector<std::string> applied;

  bool ok() const {
    if (!fibonacci_closed_form_ok) return false;
    for (const auto& r : rows) {
      if (!r.ok()) return false;
    }
    return true;
  }
};

inline Integer pow2(long e) {
  Integer out;
  mpz_ui_pow_ui(out.get_mpz_t(), 2, static_cast<unsigned long>(e));
  return out;
}

template <Scalar S>
KappaBoundReport check_kappa_bounds(const GreedySystem<S>& sys, std::size_t N) {
  if (sys.support_case() != SupportCase::MainCase) fail(ErrorKind::WrongCase, "kappa bounds need MainCase");
  const auto table = kappa_table(sys, N);
  const S& beta = sys.beta();
  const bool fib = !(S(2) < beta);
  const bool golden = at_most_golden(beta);
  const long m = small_beta_exponent(beta);
  const bool remark23 = m >= 2;
  const bool doubling = S(2) < beta;

  KappaBoundReport rep;
  if (fib) rep.applied.emplace_back("fibonacci");
  if (golden) rep.applied.emplace_back("half-exponent");
  if (remark23) rep.applied.emplace_back("m-exponent(m=" + std::to_string(m) + ")");
  if (doubling) rep.applied.emplace_back("doubling");

  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& t = table[i];
    const long n = static_cast<long>(t.n);
    KappaBoundRow row;
    row.n = t.n;
    row.kappa = t.kappa;
    row.kappa1 = t.kappa1;
    row.kappa2 = t.kappa2;
    row.kappa_bar = t.kappa_bar;
    if (i + 1 < table.size()) row.recursion_ok = table[i + 1].kappa == t.kappa + t.kappa_bar;
    if (fib) {
      row.checks.push_back({"kappa<=F(n+2)", fibonacci(n + 2), t.kappa <= fibonacci(n + 2)});
      row.checks.push_back({"kappa1<=F(n)", fibonacci(n), t.kappa1 <= fibonacci(n)});
      row.checks.push_back({"kappa2<=F(n+1)", fibonacci(n + 1), t.kappa2 <= fibonacci(n + 1)});
    }
    if (golden) {
      const Integer b = pow2(n / 2 + 1);
      row.checks.push_back({"kappa<=2^(n/2+1)", b, t.kappa <= b});
    }
    if (remark23) {
      const Integer b = pow2(n / m + 1);
      row.checks.push_back({"kappa<=2^(n/m+1)", b, t.kappa <= b});
    }
    if (doubling) {
      const Integer b = pow2(n);
      row.checks.push_back({"kappa<=2^n", b, t.kappa <= b});
    }
    rep.rows.push_back(std::move(row));
  }
  for (long k = 1; k <= static_cast<long>(N) + 2; ++k) {
    if (fibonacci(k) != fibonacci_closed_form(k)) rep.fibonacci_closed_form_ok = false;
  }
  return rep;
}

template <Scalar S>
struct DnRow {
  std::size_t n = 0;
  S partial{0};   // sum of lambda(D_k) for k <= n
  S residual{0};  // s - partial
  S bound{0};     // kappa(n) * s / beta^n
  bool ok = false;
};

template <Scalar S>
std::vector<DnRow<S>> dn_partial_sums(const GreedySystem<S>& sys, std::size_t N) {
  const auto table = kappa_table(sys, N);
  const S& s = sys.support_end();
  std::vector<DnRow<S>> out;
  S partial{0};
  for (const auto& t : table) {
    partial = partial + t.D_measure;
    DnRow<S> row;
    row.n = t.n;
    row.partial = partial;
    row.residual = s - partial;
    row.bound = ScalarTraits<S>::from_integer(t.kappa) * s * sys.beta().pow(-static_cast<long>(t.n));
    row.ok = row.residual.sign() >= 0 && !(row.bound < row.residual);
    out.push_back(std::move(row));
  }
  return out;
}

/// Walks the image end along a word; returns the end after each symbol.
/// Fails with NotFull when the word leaves the support (empty cylinder).
template <Scalar S>
std::vector<S> image_ends(const GreedySystem<S>& sys, const Word& word) {
  std::vector<S> ends;
  S t = sys.support_end();
  for (auto sym : word.symbols) {
    std::size_t j = sys.cells().size();
    for (std::size_t k = 0; k < sys.cells().size(); ++k) {
      if (sys.cells()[k].digit == sym) j = k;
    }
    if (j == sys.cells().size()) fail(ErrorKind::NotFull, "word uses a digit whose cell lies outside the support");
    auto end = branch_end(sys, t, j);
    if (!end) fail(ErrorKind::NotFull, "word describes an empty cylinder");
    t = std::move(*end);
    ends.push_back(t);
  }
  return ends;
}

template <Scalar S>
bool is_full(const GreedySystem<S>& sys, const Word& word) {
  if (word.empty()) return true;
  const auto ends = image_ends(sys, word);
  return ends.back() == sys.support_end();
}

struct Decomposition {
  std::vector<Word> blocks;
  std::vector<std::size_t> ranks;  // r_1 < ... < r_M, r_M = |word|
};

/// Splits a full word at every rank where its image returns to the full support.
template <Scalar S>
Decomposition decompose_full_word(const GreedySystem<S>& sys, const Word& word) {
  if (word.empty()) fail(ErrorKind::NotFull, "empty word");
  const auto ends = image_ends(sys, word);
  if (!(ends.back() == sys.support_end())) fail(ErrorKind::NotFull, "word is not full");
  Decomposition d;
  std::size_t prev = 0;
  for (std::size_t i = 0; i < ends.size(); ++i) {
    if (ends[i] == sys.support_end()) {
      d.blocks.push_back(word.slice(prev, i + 1));
      d.ranks.push_back(i + 1);
      prev = i + 1;
    }
  }
  return d;
}

inline std::string_view to_string(GrowthKind k) {
  switch (k) {
    case GrowthKind::Unit: return "unit";
    case GrowthKind::Blocked: return "blocked";
    case GrowthKind::Fibonacci: return "fibonacci";
    case GrowthKind::Branching: return "branching";
  }
  return "unknown";
}

}  // namespace betadd
