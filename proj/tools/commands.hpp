#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "betadd/betadd.hpp"
#include "scalar_parse.hpp"

namespace betadd::cli {

enum ExitCode : int { kOk = 0, kNegative = 1, kUsage = 2 };

struct RunConfig {
  std::string command;
  std::string beta;
  std::string digits;
  std::string backend = "exact";
  std::string mode = "auto";
  std::string format = "json";
  std::string out;
  std::string x;
  std::string word;
  std::string tail;
  std::size_t depth = 0;  // 0 picks the command default
  std::size_t steps = 0;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::size_t iterations = 1000000;
  std::size_t bins = 64;
  std::size_t runs = 3;
  std::size_t samples = 10000;

  /// Every field that influences output, in a fixed order; --out and --jobs are excluded.
  std::string canonical() const;
};

struct Artifact {
  std::string body;
  int exit_code = kOk;
};

/// Thrown for usage problems detected after argument parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

DensityMode parse_mode(const std::string& m);

template <Scalar S>
S parse_scalar(const std::string& text) {
  if constexpr (ScalarTraits<S>::exact) {
    return parse_quad(text);
  } else {
    return parse_real(text);
  }
}

template <Scalar S>
std::vector<S> parse_digits(const std::string& text) {
  std::vector<S> out;
  for (const auto& part : split_list(text)) out.push_back(parse_scalar<S>(part));
  return out;
}

inline Real to_real(const QuadExt& x) { return Real(x); }
inline Real to_real(const Real& x) { return x; }

template <Scalar S>
StepFn<Real> to_real(const StepFn<S>& f) {
  StepFn<Real> out;
  out.normalized = f.normalized;
  for (const auto& b : f.breakpoints) out.breakpoints.push_back(to_real(b));
  for (const auto& v : f.values) out.values.push_back(to_real(v));
  return out;
}

std::string meta_line(const RunConfig& cfg, std::string_view backend, std::string_view prefix);
json meta_json(const RunConfig& cfg, std::string_view backend);

template <Scalar S>
std::string render_json(const RunConfig& cfg, json body) {
  json out;
  out["meta"] = meta_json(cfg, to_string(ScalarTraits<S>::backend));
  for (auto& [k, v] : body.items()) out[k] = v;
  return out.dump(2) + "\n";
}

template <Scalar S>
std::string render_text(const RunConfig& cfg, const std::string& body, std::string_view prefix) {
  return meta_line(cfg, to_string(ScalarTraits<S>::backend), prefix) + body;
}

inline void require_format(const RunConfig& cfg, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed) {
    if (cfg.format == f) return;
  }
  throw UsageError("format '" + cfg.format + "' is not available for " + cfg.command);
}

template <Scalar S>
S beta_arg(const RunConfig& cfg) {
  S beta = parse_scalar<S>(cfg.beta);
  if (!(S(1) < beta)) throw UsageError("--beta must exceed 1");
  return beta;
}

template <Scalar S>
S point_arg(const RunConfig& cfg) {
  if (cfg.x.empty()) throw UsageError(cfg.command + " needs --x");
  return parse_scalar<S>(cfg.x);
}

template <Scalar S>
Artifact cmd_check(const RunConfig& cfg) {
  require_format(cfg, {"json"});
  const S beta = beta_arg<S>(cfg);
  const std::vector<S> digits = parse_digits<S>(cfg.digits);
  const AllowabilityReport rep = check_allowable(beta, digits);
  json body;
  body["allowable"] = {{"cond_i", rep.cond_i}, {"cond_ii", rep.cond_ii}, {"shortcut_used", rep.shortcut_used},
                       {"allowable", rep.allowable()}};
  Artifact a;
  if (!rep.allowable()) {
    a.body = render_json<S>(cfg, body);
    a.exit_code = kNegative;
    return a;
  }
  try {
    const auto sys = GreedySystem<S>::make(beta, digits);
    body["system"] = system_json(sys);
    if (sys.digit_count() == 3) {
      const S& a1 = sys.digit(1);
      const S& a2 = sys.digit(2);
      const bool cond21 = a1 * smax(beta - S(1), S(1)) < a2 && a2 < a1 * smin(S(2), beta);
      body["main_case_condition"] = cond21;
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Unsupported && e.kind() != ErrorKind::OutOfDomain) throw;
    body["system"] = {{"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
    a.exit_code = kNegative;
  }
  a.body = render_json<S>(cfg, body);
  return a;
}

template <Scalar S>
Artifact cmd_orbit(const RunConfig& cfg, const GreedySystem<S>& sys) {
  require_format(cfg, {"json", "csv"});
  const S x = point_arg<S>(cfg);
  const OrbitRecord<S> o = orbit(sys, x, cfg.steps ? cfg.steps : 10000);
  if (cfg.format == "csv") return {render_text<S>(cfg, orbit_csv(sys, o), "# "), kOk};
  json body;
  body["system"] = system_json(sys);
  body["orbit"] = orbit_json(sys, o);
  return {render_json<S>(cfg, body), kOk};
}

template <Scalar S>
Artifact cmd_expand(const RunConfig& cfg, const GreedySystem<S>& sys) {
  require_format(cfg, {"json", "csv"});
  json body;
  std::string csv = "index,digit\n";
  if (!cfg.word.empty()) {
    const Word w = sys.parse_word(cfg.word);
    std::optional<Word> tail;
    if (!cfg.tail.empty()) tail = sys.parse_word(cfg.tail);
    const S v = evaluate_word(sys.beta(), sys.digit_set(), w, tail);
    body["word"] = sys.describe_word(w);
    body["tail"] = tail ? json(sys.describe_word(*tail)) : json(nullptr);
    body["value"] = scalar_json(v);
    csv = "value\n" + v.to_decimal(kDecimalDigits) + "\n";
  } else {
    const S x = point_arg<S>(cfg);
    const std::size_t n = cfg.steps ? cfg.steps : 16;
    const Word w = expand(sys, x, n);
    json digits = json::array();
    for (std::size_t i = 0; i < w.size(); ++i) {
      digits.push_back(scalar_json(sys.digit(w.symbols[i])));
      csv += std::to_string(i + 1) + "," + sys.digit(w.symbols[i]).to_decimal(0) + "\n";
    }
    body["x"] = scalar_json(x);
    body["word"] = sys.describe_word(w);
    body["digits"] = digits;
    body["partial_sum"] = scalar_json(evaluate_word(sys.beta(), sys.digit_set(), w));
  }
  if (cfg.format == "csv") return {render_text<S>(cfg, csv, "# "), kOk};
  return {render_json<S>(cfg, body), kOk};
}

template <Scalar S>
Artifact cmd_kappa(const RunConfig& cfg, const GreedySystem<S>& sys) {
  require_format(cfg, {"json", "csv"});
  const std::size_t N = cfg.depth ? cfg.depth : 18;
  const auto table = kappa_table(sys, N);
  std::optional<KappaBoundReport> bounds;
  if (sys.support_case() == SupportCase::MainCase) bounds = check_kappa_bounds(sys, N);
  const auto dn = dn_partial_sums(sys, N);
  bool ok = !bounds || bounds->ok();
  for (const auto& r : dn) ok = ok && r.ok;

  std::string csv = "n,kappa,kappa1,kappa2,kappa_bar,bound,bound_ok\n";
  json rows = json::array();
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& t = table[i];
    std::string bound;
    bool bound_ok = true;
    if (bounds) {
      const Integer b = bounds->rows[i].tightest();
      if (b >= 0) bound = b.get_str();
      bound_ok = bounds->rows[i].ok();
    }
    csv += std::to_string(t.n) + "," + t.kappa.get_str() + "," + t.kappa1.get_str() + "," + t.kappa2.get_str() +
           "," + t.kappa_bar.get_str() + "," + bound + "," + (bound_ok ? "true" : "false") + "\n";
    json row = {{"n", t.n},
                {"kappa", t.kappa.get_str()},
                {"kappa1", t.kappa1.get_str()},
                {"kappa2", t.kappa2.get_str()},
                {"kappa_bar", t.kappa_bar.get_str()},
                {"D_measure", scalar_json(t.D_measure)},
                {"partial_D", scalar_json(dn[i].partial)},
                {"residual", scalar_json(dn[i].residual)},
                {"residual_bound", scalar_json(dn[i].bound)},
                {"residual_ok", dn[i].ok}};
    if (bounds) {
      json checks = json::array();
      for (const auto& c : bounds->rows[i].checks) {
        checks.push_back({{"name", c.name}, {"bound", c.bound.get_str()}, {"ok", c.ok}});
      }
      row["bounds"] = checks;
      row["recursion_ok"] = bounds->rows[i].recursion_ok;
    }
    rows.push_back(row);
  }
  const int code = ok ? kOk : kNegative;
  if (cfg.format == "csv") return {render_text<S>(cfg, csv, "# "), code};
  json body;
  body["system"] = system_json(sys);
  body["depth"] = N;
  body["levels"] = rows;
  if (bounds) {
    body["bounds_applied"] = bounds->applied;
    body["fibonacci_closed_form_ok"] = bounds->fibonacci_closed_form_ok;
  }
  body["ok"] = ok;
  return {render_json<S>(cfg, body), code};
}

template <Scalar S>
std::string tower_dot(const Tower<S>& tw) {
  const GreedySystem<S>& sys = *tw.sys;
  std::string out = "digraph tower {\n  rankdir=LR;\n  node [shape=box];\n";
  out += "  R0 [label=\"R0\\n[0," + tw.R0_side.to_decimal(4) + ")\"];\n";
  auto name = [](std::size_t n, std::size_t i) {
    return n == 0 ? std::string("R0") : "R" + std::to_string(n) + "_" + std::to_string(i);
  };
  for (const auto& lvl : tw.levels) {
    for (const auto& r : lvl) {
      out += "  " + name(r.n, r.i) + " [label=\"" + sys.describe_word(r.word) + "\\n[0," + r.x_end.to_decimal(4) +
             ")\"];\n";
    }
  }
  auto edges = [&](const Rect<S>& r) {
    for (std::size_t j = 0; j < r.targets.size(); ++j) {
      const std::string label = sys.digit(sys.cells()[j].digit).to_decimal(0);
      if (r.targets[j] == kFullTarget) {
        out += "  " + name(r.n, r.i) + " -> R0 [label=\"" + label + "\", style=dashed];\n";
      } else if (r.n < tw.depth) {
        out += "  " + name(r.n, r.i) + " -> " + name(r.n + 1, r.targets[j]) + " [label=\"" + label + "\"];\n";
      }
    }
  };
  edges(tw.r0);
  for (const auto& lvl : tw.levels) {
    for (const auto& r : lvl) edges(r);
  }
  out += "}\n";
  return out;
}

template <Scalar S>
json interval_json(const Interval<S>& iv) {
  json j = {{"lo", scalar_json(iv.lo)}, {"hi", scalar_json(iv.hi)}};
  j["exact"] = iv.exact ? scalar_json(*iv.exact) : json(nullptr);
  return j;
}

template <Scalar S>
Artifact cmd_tower(const RunConfig& cfg, const GreedySystem<S>& sys) {
  require_format(cfg, {"json", "dot"});
  const std::size_t N = cfg.depth ? cfg.depth : 12;
  if (N < 2) throw UsageError("tower needs --depth >= 2");
  const Tower<S> tw = build_tower(sys, N);
  if (cfg.format == "dot") return {render_text<S>(cfg, tower_dot(tw), "// "), kOk};
  const MeasureReport<S> mp = check_measure_preservation(tw, N - 1);
  const ExactnessConstants<S> ec = exactness_constants(tw);
  json levels = json::array();
  for (const auto& lvl : tw.levels) {
    json rects = json::array();
    for (const auto& r : lvl) {
      rects.push_back({{"i", r.i},
                       {"word", sys.describe_word(r.word)},
                       {"x_end", scalar_json(r.x_end)},
                       {"height", scalar_json(r.height)}});
    }
    levels.push_back({{"n", lvl.empty() ? 0 : lvl.front().n}, {"rects", rects}});
  }
  json body;
  body["system"] = system_json(sys);
  body["depth"] = N;
  body["R0_side"] = scalar_json(tw.R0_side);
  body["rect_count"] = tw.rect_count();
  body["levels"] = levels;
  body["lambda_R"] = interval_json(tw.lambda_R());
  body["tail_bound"] = scalar_json(tw.tail_bound);
  body["measure_preservation"] = {{"rects_checked", mp.rects_checked},
                                  {"rects_balanced", mp.rects_balanced},
                                  {"max_residual", scalar_json(mp.max_residual)},
                                  {"bands_disjoint", mp.bands_disjoint},
                                  {"ok", mp.ok()}};
  body["exactness"] = {{"c1", interval_json(ec.c1)}, {"c2", interval_json(ec.c2)}, {"gamma", interval_json(ec.gamma)}};
  return {render_json<S>(cfg, body), mp.ok() ? kOk : kNegative};
}

template <Scalar S>
std::vector<std::string> density_notes(const GreedySystem<S>& sys, const AcimResult<S>& a) {
  std::vector<std::string> notes;
  notes.push_back("h is normalized so that its Lebesgue integral over [0, s) equals 1");
  if constexpr (ScalarTraits<S>::exact) {
    const S& beta = sys.beta();
    if (a.phi.mode == DensityMode::Closed && a.route == "wilkinson" &&
        a.integral == (S(27) - S(4) * beta) / (beta * beta)) {
      notes.push_back(
          "integral of phi = 58 - 31*beta = (27 - 4*beta)/beta^2; dividing by 27 - 4*beta instead "
          "would leave total mass 1/beta^2");
    }
  }
  return notes;
}

template <Scalar S>
json acim_json(const GreedySystem<S>& sys, const AcimResult<S>& a) {
  json terms = json::array();
  for (const auto& [k, w] : a.phi.terms) terms.push_back({{"end", scalar_json(k)}, {"weight", scalar_json(w)}});
  json j = step_fn_json(a.h);
  j["mode"] = std::string(to_string(a.phi.mode));
  j["route"] = a.route;
  j["depth"] = a.phi.depth;
  j["tail_bound"] = scalar_json(a.tail_sup_bound);
  j["phi_integral"] = scalar_json(a.integral);
  j["phi_base"] = scalar_json(a.phi.base);
  j["phi_terms"] = terms;
  j["notes"] = density_notes(sys, a);
  return j;
}

template <Scalar S>
Artifact cmd_density(const RunConfig& cfg, const GreedySystem<S>& sys) {
  require_format(cfg, {"json", "csv"});
  const AcimResult<S> a = acim(sys, parse_mode(cfg.mode), cfg.depth);
  if (cfg.format == "csv") {
    std::string head;
    for (const auto& n : density_notes(sys, a)) head += "# note: " + n + "\n";
    head += "# mode=" + std::string(to_string(a.phi.mode)) + " tail_bound=" + a.tail_sup_bound.to_decimal(24) + "\n";
    return {render_text<S>(cfg, head + step_fn_csv(a.h), "# "), kOk};
  }
  json body;
  body["system"] = system_json(sys);
  body["density"] = acim_json(sys, a);
  return {render_json<S>(cfg, body), kOk};
}

template <Scalar S>
Artifact cmd_verify(const RunConfig& cfg, const GreedySystem<S>& sys) {
  require_format(cfg, {"json"});
  json body;
  body["system"] = system_json(sys);
  bool ok = true;
  if (sys.support_case() == SupportCase::MainCase) {
    const LemmaReport rep = verify_lemmas(sys);
    json lemmas = json::array();
    for (const auto& c : rep.checks) {
      lemmas.push_back({{"name", c.name}, {"applicable", c.applicable}, {"passed", c.passed}, {"detail", c.detail}});
    }
    body["lemmas"] = lemmas;
    ok = ok && rep.all_passed();
  }
  const AcimResult<S> a = acim(sys, parse_mode(cfg.mode), cfg.depth);
  const StepFn<S> Lh = transfer_apply(sys, a.h);
  const S residual = sup_distance(Lh, a.h);
  bool fixed;
  if (a.phi.mode == DensityMode::Closed && ScalarTraits<S>::exact) {
    fixed = residual.sign() == 0;
  } else {
    fixed = !(S(2) * a.tail_sup_bound < residual);
  }
  ok = ok && fixed;
  const S integral = a.h.integral();
  body["transfer"] = {{"mode", std::string(to_string(a.phi.mode))},
                      {"residual_sup", scalar_json(residual)},
                      {"tail_bound", scalar_json(a.tail_sup_bound)},
                      {"fixed_point", fixed}};
  body["normalization"] = scalar_json(integral);
  body["ok"] = ok;
  return {render_json<S>(cfg, body), ok ? kOk : kNegative};
}

template <Scalar S>
Artifact cmd_simulate(const RunConfig& cfg, const GreedySystem<S>& sys) {
  require_format(cfg, {"json"});
  if (cfg.iterations < 10000) throw UsageError("simulate needs --iterations >= 10000");
  if (cfg.bins < 8) throw UsageError("simulate needs --bins >= 8");
  const AcimResult<S> a = acim(sys, parse_mode(cfg.mode), cfg.depth);
  std::vector<Real> fdigits;
  for (const auto& d : sys.digit_set().digits) fdigits.push_back(to_real(d));
  const auto fsys = GreedySystem<Real>::make(to_real(sys.beta()), fdigits);
  const StepFn<Real> href = to_real(a.h);

  BirkhoffOptions opt;
  opt.iterations = cfg.iterations;
  opt.bins = cfg.bins;
  std::vector<std::uint64_t> seeds;
  for (std::size_t k = 0; k < cfg.runs; ++k) seeds.push_back(cfg.seed + k);
  const auto runs = birkhoff_runs(fsys, href, opt, seeds, cfg.jobs);
  json hist = json::array();
  for (const auto& r : runs) {
    hist.push_back({{"seed", r.seed}, {"iterations", r.iterations}, {"l1", r.l1}, {"empirical", r.empirical}});
  }

  json body;
  body["system"] = system_json(sys);
  body["histograms"] = hist;
  body["expected_bin_mass"] = runs.empty() ? json::array() : json(runs.front().expected);
  if (sys.support_case() == SupportCase::MainCase || sys.support_case() == SupportCase::BigSecondGap) {
    std::mt19937_64 rng(cfg.seed);
    const double s = sys.support_end().to_double();
    double sum = 0.0;
    std::size_t done = 0;
    for (std::size_t k = 0; k < cfg.samples; ++k) {
      const Rational u(Integer(static_cast<unsigned long>(rng() >> 11)), Integer(1) << 53);
      const S x = ScalarTraits<S>::from_rational(u) * sys.support_end();
      try {
        sum += static_cast<double>(return_times(sys, x, 1).front());
        ++done;
      } catch (const Error&) {
      }
    }
    body["return_times"] = {{"samples", done},
                            {"mean_r1", done ? sum / static_cast<double>(done) : 0.0},
                            {"kac_mean", a.integral.to_double() / s}};
  }
  return {render_json<S>(cfg, body), kOk};
}

template <Scalar S>
Artifact dispatch(const RunConfig& cfg) {
  if (cfg.command == "check") return cmd_check<S>(cfg);
  const S beta = beta_arg<S>(cfg);
  const auto sys = GreedySystem<S>::make(beta, parse_digits<S>(cfg.digits));
  if (cfg.command == "orbit") return cmd_orbit(cfg, sys);
  if (cfg.command == "expand") return cmd_expand(cfg, sys);
  if (cfg.command == "kappa") return cmd_kappa(cfg, sys);
  if (cfg.command == "tower") return cmd_tower(cfg, sys);
  if (cfg.command == "density") return cmd_density(cfg, sys);
  if (cfg.command == "verify") return cmd_verify(cfg, sys);
  if (cfg.command == "simulate") return cmd_simulate(cfg, sys);
  throw UsageError("unknown command '" + cfg.command + "'");
}

}  // namespace betadd::cli
