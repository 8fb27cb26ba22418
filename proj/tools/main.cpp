#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "commands.hpp"

namespace betadd::cli {

DensityMode parse_mode(const std::string& m) {
  if (m == "auto") return DensityMode::Auto;
  if (m == "closed") return DensityMode::Closed;
  if (m == "truncated") return DensityMode::Truncated;
  throw UsageError("unknown mode '" + m + "'");
}

std::string RunConfig::canonical() const {
  std::string c;
  auto add = [&](const char* k, const std::string& v) { c += std::string(k) + "=" + v + ";"; };
  add("command", command);
  add("beta", beta);
  add("digits", digits);
  add("backend", backend);
  add("mode", mode);
  add("format", format);
  add("x", x);
  add("word", word);
  add("tail", tail);
  add("depth", std::to_string(depth));
  add("steps", std::to_string(steps));
  add("seed", std::to_string(seed));
  add("iterations", std::to_string(iterations));
  add("bins", std::to_string(bins));
  add("runs", std::to_string(runs));
  add("samples", std::to_string(samples));
  return c;
}

json meta_json(const RunConfig& cfg, std::string_view backend) {
  return {{"tool", "betadd"},
          {"version", BETADD_VERSION},
          {"command", cfg.command},
          {"config_hash", fnv1a_hex(cfg.canonical())},
          {"backend", std::string(backend)}};
}

std::string meta_line(const RunConfig& cfg, std::string_view backend, std::string_view prefix) {
  return std::string(prefix) + "betadd " + BETADD_VERSION + " " + cfg.command +
         " config_hash=" + fnv1a_hex(cfg.canonical()) + " backend=" + std::string(backend) + "\n";
}

}  // namespace betadd::cli

namespace {

using betadd::cli::RunConfig;

void report_error(const std::string& kind, const std::string& message) {
  betadd::json j = {{"error", kind}, {"message", message}};
  std::cerr << j.dump() << "\n";
}

bool is_usage_kind(betadd::ErrorKind k) {
  using betadd::ErrorKind;
  return k == ErrorKind::Parse || k == ErrorKind::NonSquareFreeRadicand || k == ErrorKind::NegativeRadicand ||
         k == ErrorKind::IncompatibleRadicands;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--beta", cfg.beta, "base: golden, sqrt2, sqrt3, sqrt7, one_plus_sqrt2, p/q, decimal, p+q*sqrt(d)")
      ->required();
  sub->add_option("--digits", cfg.digits, "comma-separated digit list")->required();
  sub->add_option("--backend", cfg.backend, "scalar backend")->check(CLI::IsMember({"exact", "float"}));
  sub->add_option("--depth", cfg.depth, "enumeration depth (0 = command default)")->check(CLI::Range(0, 64));
  sub->add_option("--mode", cfg.mode, "density mode")->check(CLI::IsMember({"auto", "closed", "truncated"}));
  sub->add_option("--seed", cfg.seed, "random seed");
  sub->add_option("--jobs", cfg.jobs, "worker threads");
  sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "csv", "dot"}));
  sub->add_option("--out", cfg.out, "output file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  cfg.jobs = std::max(1u, std::thread::hardware_concurrency());

  CLI::App app{"Greedy beta-expansions with deleted digits: orbits, intervals, towers and invariant densities"};
  app.require_subcommand(1);

  struct Spec {
    const char* name;
    const char* help;
  };
  const Spec specs[] = {
      {"check", "allowability and support classification"},
      {"orbit", "orbit of a point with exact cycle detection"},
      {"expand", "greedy digits of a point, or the value of a digit word"},
      {"kappa", "kappa table, counting bounds and D_n partial sums"},
      {"tower", "natural-extension tower, measure checks and exactness constants"},
      {"density", "invariant density"},
      {"verify", "lemma checks and transfer-operator fixed point"},
      {"simulate", "Birkhoff histograms and return-time statistics"},
  };
  for (const auto& sp : specs) {
    CLI::App* sub = app.add_subcommand(sp.name, sp.help);
    add_common(sub, cfg);
    sub->add_option("--x", cfg.x, "point");
    sub->add_option("--steps", cfg.steps, "number of steps or digits");
    sub->add_option("--word", cfg.word, "digit word to evaluate");
    sub->add_option("--tail", cfg.tail, "repeating tail word");
    sub->add_option("--iterations", cfg.iterations, "iterates per histogram");
    sub->add_option("--bins", cfg.bins, "histogram bins");
    sub->add_option("--runs", cfg.runs, "independent seeds (seed, seed+1, ...)");
    sub->add_option("--samples", cfg.samples, "random points for return-time statistics");
    sub->callback([&cfg, sub] { cfg.command = sub->get_name(); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("Usage", e.what());
    return betadd::cli::kUsage;
  }

  try {
    betadd::cli::Artifact art = cfg.backend == "float" ? betadd::cli::dispatch<betadd::Real>(cfg)
                                                       : betadd::cli::dispatch<betadd::QuadExt>(cfg);
    if (cfg.out.empty()) {
      std::cout << art.body;
    } else {
      std::ofstream f(cfg.out, std::ios::binary);
      if (!f) {
        report_error("Io", "cannot open '" + cfg.out + "'");
        return betadd::cli::kUsage;
      }
      f << art.body;
    }
    return art.exit_code;
  } catch (const betadd::cli::UsageError& e) {
    report_error("Usage", e.what());
    return betadd::cli::kUsage;
  } catch (const betadd::Error& e) {
    report_error(std::string(betadd::to_string(e.kind())), e.what());
    return is_usage_kind(e.kind()) ? betadd::cli::kUsage : betadd::cli::kNegative;
  }
}
