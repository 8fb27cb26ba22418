// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "betadd/betadd.hpp"

using namespace betadd;

namespace {

using Clock = std::chrono::steady_clock;

QuadExt G() { return constants::golden(); }
QuadExt rat(long n, long d) { return QuadExt(Rational(n, d)); }
GreedySystem<QuadExt> golden() { return GreedySystem<QuadExt>::make(G(), {0, 3, 4}); }

struct Outcome {
  bool ok = true;
  std::string detail;
};

class Checker {
 public:
  void expect(bool cond, const std::string& what) {
    if (!cond && out_.ok) out_.detail = what;
    out_.ok = out_.ok && cond;
  }
  Outcome result() const { return out_; }

 private:
  Outcome out_;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string run_cli(const std::string& cmd) {
  std::string out;
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) return out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe.get())) out += buf.data();
  return out;
}

// 1. Golden critical orbits, computed exactly in under a second.
Outcome golden_orbits() {
  Checker c;
  const auto t0 = Clock::now();
  const auto sys = golden();
  const QuadExt b = G();
  const auto [c1, c2] = critical_points(sys);
  c.expect(c1 == QuadExt(1) && c2 == QuadExt(3) * b - QuadExt(4), "critical points");
  const auto o1 = orbit(sys, c1);
  c.expect(o1.preperiod && *o1.preperiod == 0 && o1.period && *o1.period == 6, "orbit of 1 is purely periodic, period 6");
  const auto o2 = orbit(sys, c2);
  c.expect(o2.preperiod && *o2.preperiod == 3 && o2.period && *o2.period == 6, "orbit of 3b-4: preperiod 3, period 6");
  const std::vector<QuadExt> table1{QuadExt(1), b, b * b, b.pow(-3), b.pow(-2), b.pow(-1), QuadExt(1)};
  const std::vector<QuadExt> table2{QuadExt(3) * b - QuadExt(4), QuadExt(3) - b, QuadExt(2) * b - QuadExt(1), b.pow(-1)};
  for (std::size_t k = 0; k < table1.size(); ++k) {
    c.expect(k < o1.values.size() && o1.values[k] == table1[k], "T^" + std::to_string(k) + " 1");
  }
  for (std::size_t k = 0; k < table2.size(); ++k) {
    c.expect(k < o2.values.size() && o2.values[k] == table2[k], "T^" + std::to_string(k) + " (3b-4)");
  }
  c.expect(sys.describe_word(expand(sys, QuadExt(1), 6)) == "004000", "digits of 1");
  c.expect(evaluate_word(b, sys.digit_set(), Word{}, expand(sys, QuadExt(1), 6)) == QuadExt(1), "1 = .(004000)");
  c.expect(seconds_since(t0) < 1.0, "time limit");
  return c.result();
}

// 2. The ten terms of the closed-form golden phi.
Outcome closed_terms() {
  Checker c;
  const auto p = phi_closed(golden());
  const QuadExt b = G();
  const std::map<QuadExt, QuadExt> expected{
      {QuadExt(3) * b - QuadExt(4), b.pow(-1)}, {QuadExt(3) - b, b.pow(-2)}, {QuadExt(2) * b - QuadExt(1), b.pow(-3)},
      {QuadExt(1), QuadExt(1)},                 {b, b.pow(-1)},              {b * b, b.pow(-2)},
      {b.pow(-3), b.pow(-3)},                   {b.pow(-2), b.pow(-4)},      {b.pow(-1), b.pow(-3)},
  };
  c.expect(p.base == QuadExt(1), "base term 1_[0,3)");
  c.expect(p.terms.size() == expected.size(), "nine keyed terms");
  for (const auto& [k, w] : p.terms) {
    const auto it = expected.find(k);
    c.expect(it != expected.end() && it->second == w, "term at key " + k.to_string());
  }
  return c.result();
}

// 3. Normalizer identities and the CLI note.
Outcome normalizer(const std::string& cli) {
  Checker c;
  const QuadExt b = G();
  const QuadExt integral = phi_closed(golden()).phi.integral();
  c.expect(integral == QuadExt(58) - QuadExt(31) * b, "integral = 58 - 31b");
  c.expect(integral == (QuadExt(27) - QuadExt(4) * b) / (b * b), "58 - 31b = (27 - 4b)/b^2");
  c.expect(!(integral == QuadExt(27) - QuadExt(4) * b), "27 - 4b differs");
  if (cli.empty()) {
    c.expect(false, "CLI path not configured");
  } else {
    const std::string out = run_cli("\"" + cli + "\" density --beta golden --digits 0,3,4 --mode closed --format json");
    c.expect(out.find("\"notes\"") != std::string::npos, "density JSON has notes");
    c.expect(out.find("58 - 31*beta") != std::string::npos && out.find("27 - 4*beta") != std::string::npos,
             "note names both normalizers");
  }
  return c.result();
}

// 4. Fixed-point residuals.
Outcome residuals() {
  Checker c;
  const auto sys = golden();
  const auto a = acim(sys, DensityMode::Closed);
  c.expect(sup_distance(transfer_apply(sys, a.h), a.h) == QuadExt(0), "golden residual is exactly 0");
  const std::vector<GreedySystem<QuadExt>> figs{
      GreedySystem<QuadExt>::make(constants::sqrt3(), {0, 1, 3}),
      GreedySystem<QuadExt>::make(constants::one_plus_sqrt2(), {0, 1, 3}),
      GreedySystem<QuadExt>::make(constants::sqrt7(), {0, 3, 7}),
  };
  const QuadExt cap = QuadExt(Rational(1, 1000000000));
  for (const auto& f : figs) {
    const auto t0 = Clock::now();
    const auto r = acim(f, DensityMode::Truncated);
    const QuadExt res = sup_distance(transfer_apply(f, r.h), r.h);
    const std::string tag = f.beta().to_string();
    c.expect(res <= QuadExt(2) * r.tail_sup_bound, tag + ": residual <= 2 tail");
    c.expect(QuadExt(2) * r.tail_sup_bound <= cap, tag + ": 2 tail <= 1e-9");
    c.expect(seconds_since(t0) < 10.0, tag + ": time limit");
  }
  return c.result();
}

// 5. Golden kappa formula.
Outcome kappa_formula() {
  Checker c;
  const auto rows = kappa_table(golden(), 18);
  c.expect(rows.size() == 18 && rows[0].kappa == 2, "kappa(1) = 2");
  for (std::size_t n = 2; n <= 18 && n <= rows.size(); ++n) {
    const long a = static_cast<long>(n - 1) / 3 + 2, b = static_cast<long>(n - 2) / 3 + 1;
    c.expect(rows[n - 1].kappa == fibonacci(a) + fibonacci(b), "kappa(" + std::to_string(n) + ")");
  }
  return c.result();
}

// 6. Heights: closed value at key 1 and the depth-30 truncation.
Outcome heights() {
  Checker c;
  const auto sys = golden();
  const auto tw = build_tower(sys, 30);
  const QuadExt closed = closed_height(tw, QuadExt(1));
  c.expect(closed == QuadExt(3), "closed height at key 1 is 3");
  const QuadExt trunc = truncated_height(tw, QuadExt(1));
  const auto bounds = check_kappa_bounds(sys, 30);
  const Integer k30 = bounds.rows.back().tightest();
  c.expect(k30 > 0, "a kappa bound applies at n = 30");
  const QuadExt gap = QuadExt(Rational(k30)) * QuadExt(3) * G().pow(-30);
  c.expect(trunc <= closed, "truncation from below");
  c.expect(closed - trunc <= gap, "gap within kappa bound(30) * 3 / b^30");
  return c.result();
}

// 7. Random quadratic main-case systems.
Outcome random_main_case() {
  Checker c;
  std::mt19937_64 rng(2024);
  const std::array<long, 4> radicands{2, 3, 5, 7};
  std::uniform_int_distribution<int> pick(0, 3);
  std::uniform_int_distribution<long> num(-40, 40), den(1, 12);
  int built = 0;
  while (built < 100) {
    const long d = radicands[static_cast<std::size_t>(pick(rng))];
    const QuadExt beta = QuadExt::make(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)), d);
    if (beta.is_rational() || !(rat(6, 5) < beta) || !(beta < rat(29, 10))) continue;
    const QuadExt lo = QuadExt(1) < beta - QuadExt(1) ? beta - QuadExt(1) : QuadExt(1);
    const QuadExt hi = beta < QuadExt(2) ? beta : QuadExt(2);
    if (!(lo < hi)) continue;
    const QuadExt a2(QuadExt::parse_rational(((lo + hi) / QuadExt(2)).to_decimal(6)));
    if (!(lo < a2) || !(a2 < hi)) continue;
    const auto sys = GreedySystem<QuadExt>::make(beta, {QuadExt(0), QuadExt(1), a2});
    ++built;
    const std::string tag = beta.to_string() + " {0,1," + a2.to_string() + "}";
    c.expect(sys.support_case() == SupportCase::MainCase, tag + ": main case");
    if (sys.support_case() != SupportCase::MainCase) continue;
    c.expect(check_kappa_bounds(sys, 15).ok(), tag + ": kappa bounds");
    c.expect(verify_lemmas(sys).all_passed(), tag + ": lemmas");
  }
  return c.result();
}

// 8. Support classification of the four reference systems.
Outcome classification() {
  Checker c;
  struct Case {
    GreedySystem<QuadExt> sys;
    SupportCase kind;
    QuadExt s;
  };
  const std::vector<Case> cases{
      {GreedySystem<QuadExt>::make(constants::sqrt3(), {0, 1, 3}), SupportCase::IsoClassical, QuadExt(1)},
      {GreedySystem<QuadExt>::make(constants::one_plus_sqrt2(), {0, 1, 3}), SupportCase::BigSecondGap, QuadExt(2)},
      {GreedySystem<QuadExt>::make(constants::sqrt7(), {0, 3, 7}), SupportCase::BigSecondGap, QuadExt(4)},
      {golden(), SupportCase::MainCase, QuadExt(3)},
  };
  for (const auto& k : cases) {
    c.expect(k.sys.support_case() == k.kind && k.sys.support_end() == k.s, k.sys.beta().to_string());
  }
  return c.result();
}

// 9. Tower measure preservation and the lambda bracket.
Outcome tower_measure() {
  Checker c;
  const auto tw = build_tower(golden(), 12);
  c.expect(check_measure_preservation(tw, 11).ok(), "measure preserved to level 11");
  const QuadExt closed = QuadExt(3) * (QuadExt(58) - QuadExt(31) * G());
  const auto lam = tw.lambda_R();
  c.expect(lam.lo <= closed && closed <= lam.hi, "lambda bracket");
  c.expect(lam.exact && *lam.exact == closed, "lambda closed form");
  return c.result();
}

// 10. Induced map against first full prefixes.
Outcome induced_returns() {
  Checker c;
  const auto sys = golden();
  const auto tw = build_tower(sys, 40);
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<long> grid(0, (1L << 30) - 1);
  auto point = [&] { return QuadExt(Rational(grid(rng), 1L << 30)) * QuadExt(3); };
  int done = 0, resampled = 0;
  while (done < 1000) {
    const QuadExt x = point(), y1 = point(), y2 = point();
    try {
      const auto a = induced_map(tw, x, y1);
      const auto b = induced_map(tw, x, y2);
      const Word w = expand(sys, x, 41);
      std::size_t first = 0;
      for (std::size_t k = 1; k <= 41 && first == 0; ++k) {
        if (is_full(sys, w.prefix(k))) first = k;
      }
      c.expect(a.r1 == first, "r1 equals first full prefix");
      c.expect(a.r1 == b.r1 && a.x == b.x, "return independent of y");
      if (first > 0) {
        const auto dec = decompose_full_word(sys, w.prefix(first));
        c.expect(dec.ranks.size() == 1 && dec.ranks.front() == first, "first full prefix is one block");
      }
      ++done;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BoundaryPoint && e.kind() != ErrorKind::OrbitBudgetExceeded) throw;
      ++resampled;
    }
  }
  c.expect(resampled < 10, "few resamples");
  return c.result();
}

// 11. Parry densities.
Outcome parry() {
  Checker c;
  const QuadExt b = G();
  const auto h = normalize(parry_density(b).phi).canonical();
  const QuadExt norm = QuadExt(1) + b.pow(-2);
  c.expect(h.pieces() == 2 && h.breakpoints[1] == b.inverse(), "two steps split at 1/b");
  c.expect(h.pieces() == 2 && h.values[0] == (QuadExt(1) + b.inverse()) / norm && h.values[1] == QuadExt(1) / norm,
           "golden Parry values");
  const auto gsys = GreedySystem<QuadExt>::classical(b);
  const auto a = acim(gsys).h.canonical();
  c.expect(a.breakpoints == h.breakpoints && a.values == h.values, "acim equals the Parry density");
  c.expect(sup_distance(transfer_apply(gsys, h), h) == QuadExt(0), "fixed by L");
  const auto u = acim(GreedySystem<QuadExt>::classical(QuadExt(2))).h.canonical();
  c.expect(u.pieces() == 1 && u.values.front() == QuadExt(1), "beta = 2 is uniform");
  return c.result();
}

// 12. Birkhoff histograms against the golden density.
Outcome birkhoff() {
  Checker c;
  const auto t0 = Clock::now();
  const auto sys = GreedySystem<Real>::make(Real(G()), {Real(0), Real(3), Real(4)});
  const auto h = convert<Real>(acim(golden(), DensityMode::Closed).h);
  BirkhoffOptions opt;
  opt.iterations = 1000000;
  opt.bins = 64;
  const auto runs = birkhoff_runs(sys, h, opt, {1, 2, 3}, 3);
  for (const auto& r : runs) {
    std::ostringstream os;
    os << "seed " << r.seed << ": L1 = " << r.l1;
    c.expect(r.l1 < 0.02, os.str());
  }
  c.expect(seconds_since(t0) < 30.0, "time limit");
  return c.result();
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
#ifdef BETADD_CLI
  cli = BETADD_CLI;
#endif
  if (argc > 1) cli = argv[1];

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"golden critical orbits", golden_orbits},
      {"closed phi terms", closed_terms},
      {"normalizer identities", [&] { return normalizer(cli); }},
      {"fixed-point residuals", residuals},
      {"kappa formula", kappa_formula},
      {"tower heights", heights},
      {"random main-case bounds", random_main_case},
      {"support classification", classification},
      {"tower measure", tower_measure},
      {"induced map returns", induced_returns},
      {"parry densities", parry},
      {"birkhoff histograms", birkhoff},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %2zu %-26s %.2fs%s%s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                seconds_since(t0), o.ok ? "" : "  ", o.detail.c_str());
    failed += o.ok ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
