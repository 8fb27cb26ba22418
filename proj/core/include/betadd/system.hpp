#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "betadd/error.hpp"
#include "betadd/scalar.hpp"

namespace betadd {

/// Where the acim lives and which density route applies.
enum class SupportCase {
  IsoClassical,       // support [0, a1); conjugate to the classical map
  BigSecondGap,       // support [0, a2 - a1); beta > 2
  MainCase,           // a1*max(beta-1, 1) < a2 < a1*min(2, beta); support [0, a1)
  ClassicalComplete,  // digits {0, c, 2c, ..., floor(beta)c}; support [0, c)
  TopCellFull,        // a1 = a2/(beta-1), beta > 2; support [0, a1), top cell full
  Wilkinson,          // more than three digits with m < beta <= m+1
};

inline std::string_view to_string(SupportCase c);

/// A digit sequence, stored as indices into the owning system's digit set.
struct Word {
  std::vector<std::uint8_t> symbols;

  std::size_t size() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }
  Word operator+(const Word& o) const {
    Word w = *this;
    w.symbols.insert(w.symbols.end(), o.symbols.begin(), o.symbols.end());
    return w;
  }
  Word prefix(std::size_t n) const {
    return Word{{symbols.begin(), symbols.begin() + static_cast<std::ptrdiff_t>(n)}};
  }
  Word slice(std::size_t from, std::size_t to) const {
    return Word{{symbols.begin() + static_cast<std::ptrdiff_t>(from),
                 symbols.begin() + static_cast<std::ptrdiff_t>(to)}};
  }
  friend bool operator==(const Word&, const Word&) = default;
};

template <Scalar S>
struct DigitSet {
  std::vector<S> digits;  // strictly increasing, digits[0] == 0
  S shift{0};             // the a0 subtracted during normalization

  std::size_t size() const { return digits.size(); }
  const S& operator[](std::size_t i) const { return digits[i]; }
  const S& back() const { return digits.back(); }
};

struct AllowabilityReport {
  bool cond_i = false;   // strictly increasing
  bool cond_ii = false;  // max gap <= (a_m - a_0)/(beta - 1)
  bool shortcut_used = false;

  bool allowable() const { return cond_i && cond_ii; }
};

template <Scalar S>
struct Cell {
  std::size_t digit;  // index into the digit set
  S left;
  S right;            // half-open [left, right), clipped to the support
};

template <Scalar S>
struct DigitChoice {
  std::size_t digit;
  bool ambiguous = false;  // float backend: within tolerance of a cell edge
};

template <Scalar S>
struct OrbitRecord {
  S start;
  std::vector<S> values;
  Word digits;
  std::optional<std::size_t> preperiod;
  std::optional<std::size_t> period;
  std::vector<std::size_t> ambiguous_steps;
};

struct LemmaCheck {
  std::string name;
  bool applicable = false;
  bool passed = false;
  std::string detail;
};

struct LemmaReport {
  std::vector<LemmaCheck> checks;

  bool all_passed() const {
    for (const auto& c : checks) {
      if (c.applicable && !c.passed) return false;
    }
    return true;
  }
  std::size_t applicable_count() const {
    std::size_t n = 0;
    for (const auto& c : checks) n += c.applicable ? 1 : 0;
    return n;
  }
};

template <Scalar S>
long floor_to_long(const S& x) {
  if constexpr (ScalarTraits<S>::exact) {
    return x.floor().get_si();
  } else {
    return boost::multiprecision::floor(x.value()).template convert_to<long>();
  }
}

/// Pedicini's conditions (i) and (ii) on a raw (not yet normalized) digit list.
template <Scalar S>
AllowabilityReport check_allowable(const S& beta, const std::vector<S>& digits) {
  AllowabilityReport r;
  if (digits.empty()) return r;
  r.cond_i = true;
  for (std::size_t i = 1; i < digits.size(); ++i) {
    if (!(digits[i - 1] < digits[i])) r.cond_i = false;
  }
  if (!r.cond_i) return r;
  const S span = digits.back() - digits.front();
  S max_gap{0};
  for (std::size_t i = 1; i < digits.size(); ++i) max_gap = smax(max_gap, digits[i] - digits[i - 1]);
  r.cond_ii = !(span / (beta - S(1)) < max_gap);
  if (digits.size() == 3 && S(1) < beta && !(S(2) < beta)) {
    r.shortcut_used = digits[2] - digits[0] < beta * (digits[1] - digits[0]);
  }
  return r;
}

/// Support index i0: the smallest i with T[0, a_i - a_{i-1}) inside itself.
/// Uses unclipped cells, so it applies to any digit count.
template <Scalar S>
std::size_t support_index(const S& beta, const std::vector<S>& digits) {
  const std::size_t m = digits.size() - 1;
  const S domain_end = digits.back() / (beta - S(1));
  for (std::size_t i = 1; i <= m; ++i) {
    const S g = digits[i] - digits[i - 1];
    bool invariant = true;
    for (std::size_t j = 0; j <= m && invariant; ++j) {
      const S left = digits[j] / beta;
      if (!(left < g)) break;
      const S right = j < m ? digits[j + 1] / beta : domain_end;
      const S image = beta * smin(g, right) - digits[j];
      if (g < image) invariant = false;
    }
    if (invariant) return i;
  }
  fail(ErrorKind::Unsupported, "no invariant initial interval found");
}

/// Support decision tree for normalized three-digit sets {0, a1, a2}.
template <Scalar S>
std::pair<SupportCase, S> classify_support(const S& beta, const std::vector<S>& digits) {
  if (digits.size() != 3) fail(ErrorKind::Unsupported, "support classification needs three digits");
  if (!(S(1) < beta) || !(beta < S(3))) fail(ErrorKind::OutOfDomain, "three-digit pipeline needs 1 < beta < 3");
  if (!check_allowable(beta, digits).allowable()) fail(ErrorKind::NotAllowable, "digit set is not allowable");
  const S& a1 = digits[1];
  const S& a2 = digits[2];
  const S gap2 = a2 - a1;
  if (a1 < a2 / beta) {
    // a1 sits in Delta(a1), so T a1 = (beta - 1) a1.
    if (!(a1 < beta * a1 - a1)) return {SupportCase::IsoClassical, a1};
    return {SupportCase::BigSecondGap, gap2};
  }
  if (a1 < gap2) return {SupportCase::BigSecondGap, gap2};
  if (gap2 == a1) return {SupportCase::IsoClassical, a1};
  if (a1 == a2 / beta) return {SupportCase::IsoClassical, a1};
  if (a1 == a2 / (beta - S(1))) return {SupportCase::TopCellFull, a1};
  return {SupportCase::MainCase, a1};
}

template <Scalar S>
class GreedySystem {
 public:
  /// Normalizes digits (subtracts a0), checks allowability and classifies the support.
  static GreedySystem make(S beta, std::vector<S> digits) {
    if (!(S(1) < beta)) fail(ErrorKind::OutOfDomain, "beta must exceed 1");
    if (digits.size() < 2) fail(ErrorKind::Unsupported, "need at least two digits");
    const AllowabilityReport rep = check_allowable(beta, digits);
    if (!rep.allowable()) fail(ErrorKind::NotAllowable, "digit set is not allowable for this beta");

    GreedySystem sys;
    sys.beta_ = std::move(beta);
    sys.digits_.shift = digits.front();
    for (auto& d : digits) d = d - sys.digits_.shift;
    sys.digits_.digits = std::move(digits);
    const auto& a = sys.digits_.digits;

    if (is_arithmetic(a) && static_cast<long>(a.size()) - 1 == floor_to_long(sys.beta_)) {
      sys.case_ = SupportCase::ClassicalComplete;
      sys.s_ = a[1];
    } else if (a.size() == 3) {
      auto [c, s] = classify_support(sys.beta_, a);
      sys.case_ = c;
      sys.s_ = s;
    } else if (a.size() == 2) {
      sys.case_ = SupportCase::ClassicalComplete;
      sys.s_ = a[1];
    } else {
      const long m = static_cast<long>(a.size()) - 1;
      if (!(S(m) < sys.beta_) || S(m + 1) < sys.beta_) {
        fail(ErrorKind::Unsupported, "support classification for this many digits needs m < beta <= m+1");
      }
      const std::size_t i0 = support_index(sys.beta_, a);
      sys.case_ = SupportCase::Wilkinson;
      sys.s_ = a[i0] - a[i0 - 1];
    }
    sys.build_cells();
    return sys;
  }

  /// The classical greedy map with digits {0, 1, ..., floor(beta)} on [0, 1).
  static GreedySystem classical(S beta) {
    if (!(S(1) < beta)) fail(ErrorKind::OutOfDomain, "beta must exceed 1");
    GreedySystem sys;
    const long top = floor_to_long(beta);
    sys.beta_ = std::move(beta);
    for (long k = 0; k <= top; ++k) sys.digits_.digits.push_back(S(k));
    sys.case_ = SupportCase::ClassicalComplete;
    sys.s_ = S(1);
    sys.build_cells();
    return sys;
  }

  const S& beta() const { return beta_; }
  const DigitSet<S>& digit_set() const { return digits_; }
  const S& digit(std::size_t i) const { return digits_.digits[i]; }
  std::size_t digit_count() const { return digits_.size(); }
  SupportCase support_case() const { return case_; }
  const S& support_end() const { return s_; }
  const std::vector<Cell<S>>& cells() const { return cells_; }
  S domain_end() const { return digits_.back() / (beta_ - S(1)); }
  Backend backend() const { return ScalarTraits<S>::backend; }

  /// Greedy digit: the largest a_j with a_j/beta <= x, on [0, a_m/(beta-1)].
  DigitChoice<S> greedy_digit(const S& x) const {
    if (x.sign() < 0 || domain_end() < x) fail(ErrorKind::OutOfDomain, "point outside [0, a_m/(beta-1)]");
    std::size_t j = 0;
    bool ambiguous = false;
    for (std::size_t k = 1; k < digits_.size(); ++k) {
      const S edge = digits_[k] / beta_;
      if constexpr (!ScalarTraits<S>::exact) {
        if (ScalarTraits<S>::near(x, edge)) ambiguous = true;
      }
      if (!(x < edge)) j = k;
    }
    return {j, ambiguous};
  }

  S apply(const S& x, std::size_t digit) const { return beta_ * x - digits_[digit]; }

  S step(const S& x) const { return apply(x, greedy_digit(x).digit); }

  /// Index of the clipped cell containing x in [0, s).
  std::size_t cell_of(const S& x) const {
    if (x.sign() < 0 || !(x < s_)) fail(ErrorKind::OutOfDomain, "point outside the support");
    std::size_t idx = 0;
    for (std::size_t k = 1; k < cells_.size(); ++k) {
      if (!(x < cells_[k].left)) idx = k;
    }
    return idx;
  }

  /// True when x coincides with an interior cell edge.
  bool on_boundary(const S& x) const {
    for (std::size_t k = 1; k < cells_.size(); ++k) {
      if (ScalarTraits<S>::near(x, cells_[k].left)) return true;
    }
    return false;
  }

  std::string describe_word(const Word& w) const {
    std::string out;
    bool small = true;
    for (std::size_t i = 0; i < digits_.size(); ++i) {
      if constexpr (ScalarTraits<S>::exact) {
        const S& a = digits_[i];
        if (!a.is_rational() || a.p().get_den() != 1 || a.p() > 9) small = false;
      } else {
        small = false;
      }
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!small && i) out += ',';
      out += small ? digits_[w.symbols[i]].to_decimal(0) : digits_[w.symbols[i]].to_decimal(6);
    }
    return out;
  }

  /// Parses a word written in digit values ("04000" for single-character digits, else comma separated).
  Word parse_word(const std::string& text) const {
    Word w;
    std::vector<std::string> parts;
    if (text.find(',') != std::string::npos) {
      std::string cur;
      for (char c : text) {
        if (c == ',') {
          parts.push_back(cur);
          cur.clear();
        } else {
          cur.push_back(c);
        }
      }
      parts.push_back(cur);
    } else {
      for (char c : text) parts.emplace_back(1, c);
    }
    for (const auto& p : parts) {
      const S v = ScalarTraits<S>::from_rational(QuadExt::parse_rational(p));
      bool found = false;
      for (std::size_t i = 0; i < digits_.size(); ++i) {
        if (digits_[i] == v) {
          w.symbols.push_back(static_cast<std::uint8_t>(i));
          found = true;
          break;
        }
      }
      if (!found) fail(ErrorKind::Parse, "'" + p + "' is not a digit of this system");
    }
    return w;
  }

 private:
  static bool is_arithmetic(const std::vector<S>& a) {
    for (std::size_t i = 1; i < a.size(); ++i) {
      if (!(a[i] - a[i - 1] == a[1])) return false;
    }
    return true;
  }

  void build_cells() {
    cells_.clear();
    const std::size_t m = digits_.size() - 1;
    for (std::size_t j = 0; j <= m; ++j) {
      const S left = digits_[j] / beta_;
      if (!(left < s_)) break;
      S right = j < m ? digits_[j + 1] / beta_ : domain_end();
      cells_.push_back({j, left, smin(right, s_)});
    }
  }

  S beta_{2};
  DigitSet<S> digits_;
  SupportCase case_ = SupportCase::ClassicalComplete;
  S s_{1};
  std::vector<Cell<S>> cells_;
};

/// Iterates T from x, stopping at an exact repeat (exact backend) or after n_max steps.
template <Scalar S>
OrbitRecord<S> orbit(const GreedySystem<S>& sys, const S& x, std::size_t n_max = 10000) {
  OrbitRecord<S> rec;
  rec.start = x;
  rec.values.push_back(x);
  std::unordered_map<QuadExt, std::size_t> seen;
  if constexpr (ScalarTraits<S>::exact) seen.emplace(x, 0);
  S cur = x;
  for (std::size_t k = 0; k < n_max; ++k) {
    const DigitChoice<S> choice = sys.greedy_digit(cur);
    if (choice.ambiguous) rec.ambiguous_steps.push_back(k);
    rec.digits.symbols.push_back(static_cast<std::uint8_t>(choice.digit));
    cur = sys.apply(cur, choice.digit);
    rec.values.push_back(cur);
    if constexpr (ScalarTraits<S>::exact) {
      auto [it, inserted] = seen.emplace(cur, k + 1);
      if (!inserted) {
        rec.preperiod = it->second;
        rec.period = k + 1 - it->second;
        break;
      }
    }
  }
  return rec;
}

template <Scalar S>
Word expand(const GreedySystem<S>& sys, const S& x, std::size_t n) {
  Word w;
  S cur = x;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t d = sys.greedy_digit(cur).digit;
    w.symbols.push_back(static_cast<std::uint8_t>(d));
    cur = sys.apply(cur, d);
  }
  return w;
}

/// Sum of b_i / beta^i over the word, plus an optional repeating tail summed in closed form.
template <Scalar S>
S evaluate_word(const S& beta, const DigitSet<S>& digits, const Word& word,
                const std::optional<Word>& repeating_tail = std::nullopt) {
  const S inv = S(1) / beta;
  S sum{0};
  S scale = inv;
  for (auto sym : word.symbols) {
    sum = sum + digits[sym] * scale;
    scale = scale * inv;
  }
  if (repeating_tail) {
    if (repeating_tail->empty()) fail(ErrorKind::EmptyTail, "repeating tail must be nonempty");
    S block{0};
    S bscale = inv;
    for (auto sym : repeating_tail->symbols) {
      block = block + digits[sym] * bscale;
      bscale = bscale * inv;
    }
    const S tail = block / (S(1) - beta.pow(-static_cast<long>(repeating_tail->size())));
    sum = sum + tail * beta.pow(-static_cast<long>(word.size()));
  }
  return sum;
}

template <Scalar S>
struct ClassicalStep {
  long digit;
  S image;
};

/// Classical greedy map T_c on [0, floor(beta)/(beta-1)].
template <Scalar S>
ClassicalStep<S> classical_step(const S& beta, const S& x) {
  const long top = floor_to_long(beta);
  const S end = S(top) / (beta - S(1));
  if (x.sign() < 0 || end < x) fail(ErrorKind::OutOfDomain, "point outside the classical domain");
  long digit = 0;
  for (long k = 1; k <= top; ++k) {
    if (!(x < S(k) / beta)) digit = k;
  }
  return {digit, beta * x - S(digit)};
}

template <Scalar S>
std::pair<S, S> critical_points(const GreedySystem<S>& sys) {
  if (sys.support_case() != SupportCase::MainCase) fail(ErrorKind::WrongCase, "critical points need MainCase");
  const S& a1 = sys.digit(1);
  const S& a2 = sys.digit(2);
  std::pair<S, S> pts{a2 - a1, sys.beta() * a1 - a2};
  for (const S* p : {&pts.first, &pts.second}) {
    if (p->sign() < 0 || !(*p < sys.support_end())) {
      fail(ErrorKind::WrongCase, "critical point outside [0, s): condition on digits violated");
    }
  }
  return pts;
}

/// Largest m >= 1 with beta^m <= 2 (0 when beta > 2), capped at `cap`.
template <Scalar S>
long small_beta_exponent(const S& beta, long cap = 256) {
  long m = 0;
  S power = beta;
  while (m < cap && !(S(2) < power)) {
    ++m;
    power = power * beta;
  }
  return m;
}

template <Scalar S>
bool at_most_golden(const S& beta) {
  // beta <= G  <=>  beta^2 <= beta + 1 for beta > 0
  return !(beta + S(1) < beta * beta);
}

template <Scalar S>
LemmaReport verify_lemmas(const GreedySystem<S>& sys) {
  if (sys.support_case() != SupportCase::MainCase) fail(ErrorKind::WrongCase, "lemma checks need MainCase");
  const S& beta = sys.beta();
  const S& a1 = sys.digit(1);
  const S& a2 = sys.digit(2);
  const S zero_cell_end = a1 / beta;
  const auto [c1, c2] = critical_points(sys);
  LemmaReport rep;

  LemmaCheck second_gap{"second gap avoids the top cell (beta <= 2)", false, false, {}};
  if (!(S(2) < beta)) {
    second_gap.applicable = true;
    second_gap.passed = (a2 - a1) < a2 / beta;
    second_gap.detail = "a2-a1 = " + (a2 - a1).to_decimal(12) + " vs a2/beta = " + (a2 / beta).to_decimal(12);
  }
  rep.checks.push_back(second_gap);

  LemmaCheck golden{"critical points in Delta(0) (beta <= golden mean)", false, false, {}};
  if (at_most_golden(beta)) {
    golden.applicable = true;
    golden.passed = c1 < zero_cell_end && c2 < zero_cell_end;
    golden.detail = "a1/beta = " + zero_cell_end.to_decimal(12);
  }
  rep.checks.push_back(golden);

  LemmaCheck small{"first m iterates in Delta(0) (beta <= 2^(1/m))", false, false, {}};
  const long m = small_beta_exponent(beta);
  if (m >= 2) {
    small.applicable = true;
    small.passed = true;
    for (const S& c : {c1, c2}) {
      S cur = c;
      for (long i = 0; i < m; ++i) {
        if (!(cur < zero_cell_end)) {
          small.passed = false;
          break;
        }
        cur = sys.step(cur);
      }
    }
    small.detail = "m = " + std::to_string(m);
  }
  rep.checks.push_back(small);
  return rep;
}

inline std::string_view to_string(SupportCase c) {
  switch (c) {
    case SupportCase::IsoClassical: return "IsoClassical";
    case SupportCase::BigSecondGap: return "BigSecondGap";
    case SupportCase::MainCase: return "MainCase";
    case SupportCase::ClassicalComplete: return "ClassicalComplete";
    case SupportCase::TopCellFull: return "TopCellFull";
    case SupportCase::Wilkinson: return "Wilkinson";
  }
  return "Unknown";
}

}  // namespace betadd
