// fracopt: solve, verify, and inspect parametric linear-fractional
// extremal problems over probability measures from the command line.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fracopt/fracopt.hpp"

namespace {

using namespace fracopt;

std::string format_point(const Point& p) {
  std::string s = "[";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += format_double(p[i]);
  }
  return s + "]";
}

std::uint64_t env_seed_default() {
  if (const char* env = std::getenv("FRACOPT_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      std::cerr << "warning: ignoring non-numeric FRACOPT_SEED\n";
    }
  }
  return 0;
}

/// Precedence: --seed flag, then the problem file, then FRACOPT_SEED, then 0.
void resolve_seed(const std::optional<std::uint64_t>& flag_seed, LoadedProblem& loaded) {
  if (flag_seed) {
    loaded.config.seed = *flag_seed;
  } else if (!loaded.seed_from_file) {
    loaded.config.seed = env_seed_default();
  }
}

struct SolveOptions {
  std::string path;
  std::optional<std::string> direction;
  std::optional<double> epsilon;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<int> multistarts;
  std::string out_path;
  std::string format = "text";
};

int run_solve(const SolveOptions& opt) {
  LoadedProblem loaded = load_problem_file(opt.path);
  resolve_seed(opt.seed, loaded);
  if (opt.direction) {
    if (*opt.direction != "max" && *opt.direction != "min")
      throw SchemaError("--direction must be max or min");
    loaded.config.direction = *opt.direction == "max" ? Direction::Max : Direction::Min;
  }
  if (opt.epsilon) loaded.config.epsilon = *opt.epsilon;
  if (opt.grid) loaded.config.grid_per_dim = *opt.grid;
  if (opt.multistarts) loaded.config.multistarts = *opt.multistarts;
  loaded.config.validate();

  const auto start = std::chrono::steady_clock::now();
  const SolveReport report = optimize(loaded.problem, loaded.config);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const Json problem_json = problem_to_json(loaded.problem, loaded.config);
  const Json report_json = report_to_json(report, problem_json, loaded.config, wall);

  if (!opt.out_path.empty()) write_file_atomic(opt.out_path, canonical_dump(report_json));

  if (opt.format == "json") {
    std::cout << canonical_dump(report_json);
  } else {
    std::cout << "problem:        " << loaded.problem.name << "\n"
              << "hash:           " << problem_hash(problem_json) << "\n"
              << "direction:      " << to_string(loaded.config.direction) << "\n"
              << "seed:           " << loaded.config.seed << "\n"
              << "classification: " << to_string(report.classification) << "\n"
              << "best_alpha:     " << format_point(report.best_alpha) << "\n"
              << "best_u:         " << format_point(report.best_u) << "\n"
              << "best_value:     " << format_double(report.best_value) << "\n"
              << "evaluations:    " << report.evaluations << "\n"
              << "rounds:         " << report.rounds << "\n"
              << "wall_time:      " << wall << " s\n";
    if (report.certificate) {
      const auto& c = *report.certificate;
      std::cout << "certificate:    value " << format_double(c.value) << " within epsilon "
                << format_double(c.epsilon) << " of sup estimate "
                << format_double(c.sup_estimate) << "\n";
    }
    if (report.witness) {
      const auto& seq = report.witness->sequence;
      std::cout << "witness:        " << seq.size() << " entries, final value "
                << format_double(seq.back().value) << "\n";
    }
    if (!opt.out_path.empty()) std::cout << "report:         " << opt.out_path << "\n";
  }
  return report.classification == Classification::Indeterminate ? 2 : 0;
}

struct VerifyOptions {
  std::string path;
  std::optional<std::uint64_t> seed;
  std::size_t samples = 2000;
  double tol = 1e-9;
  std::string report_path;
};

int run_verify(const VerifyOptions& opt) {
  LoadedProblem loaded = load_problem_file(opt.path);
  resolve_seed(opt.seed, loaded);
  const ProblemDefinition& p = loaded.problem;

  int failures = 0;
  const auto check = [&](bool ok, const std::string& label) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << label << "\n";
    if (!ok) ++failures;
  };

  const SolveReport report = optimize(p, loaded.config);
  std::cout << "classification: " << to_string(report.classification) << ", best_value "
            << format_double(report.best_value) << "\n";

  // the reported optimum must be realized by the degenerate measure at best_u
  const double realized =
      functional_value(p, report.best_alpha, degenerate(p.U, report.best_u));
  check(realized == report.best_value, "degenerate-measure value matches best_value exactly");

  const bool bounded_result = report.classification == Classification::Attained ||
                              report.classification == Classification::EpsilonOptimal;

  if (p.U.kind() == ControlSpace::Kind::Finite && bounded_result) {
    // oracle agreement at the optimal parameter
    FiniteInstance inst;
    inst.direction = loaded.config.direction;
    for (const Point& u : p.U.points()) {
      inst.a.push_back(evaluate_at(p.A, report.best_alpha, u));
      inst.b.push_back(evaluate_at(p.B, report.best_alpha, u));
    }
    const SimplexOptimum oracle = simplex_lfp_value(inst, 50, 100000, loaded.config.seed);
    check(std::fabs(oracle.value - report.best_value) <= opt.tol,
          "simplex oracle agrees with the solver at best_alpha (|diff| <= tol)");

    // sampled parameters must never beat the reported optimum
    bool dominated = true;
    Rng rng(Rng::mix(loaded.config.seed, 0xbeefULL));
    for (std::size_t s = 0; s < 20; ++s) {
      Point alpha(p.alpha_dim());
      for (std::size_t i = 0; i < alpha.size(); ++i)
        alpha[i] = rng.uniform(p.S.lower()[i], p.S.upper()[i]);
      FiniteInstance at_alpha;
      at_alpha.direction = loaded.config.direction;
      for (const Point& u : p.U.points()) {
        at_alpha.a.push_back(evaluate_at(p.A, alpha, u));
        at_alpha.b.push_back(evaluate_at(p.B, alpha, u));
      }
      const double v = simplex_lfp_value(at_alpha, 50, 10000, rng.next_u64()).value;
      const bool ok = loaded.config.direction == Direction::Max
                          ? v <= report.best_value + opt.tol
                          : v >= report.best_value - opt.tol;
      dominated = dominated && ok;
    }
    check(dominated, "sampled-parameter oracle optima never beat the reported optimum");
  } else if (bounded_result) {
    // mixture dominance sampling on box spaces
    bool dominated = true;
    std::size_t tested = 0;
    for (std::size_t s = 0; s < opt.samples; ++s) {
      Rng rng(Rng::mix(loaded.config.seed, 0x7e57ULL + s));
      Point alpha(p.alpha_dim());
      for (std::size_t i = 0; i < alpha.size(); ++i)
        alpha[i] = rng.uniform(p.S.lower()[i], p.S.upper()[i]);
      const std::size_t k = 1 + rng.uniform_index(5);
      try {
        const MixtureMeasure psi =
            random_mixture(p.U, k, rng.next_u64(), loaded.config.truncation_bound);
        const double v = functional_value(p, alpha, psi);
        ++tested;
        const bool ok = loaded.config.direction == Direction::Max
                            ? v <= report.best_value + opt.tol
                            : v >= report.best_value - opt.tol;
        dominated = dominated && ok;
      } catch (const Error&) {
        continue;  // unevaluable sample
      }
    }
    check(dominated && tested > 0, "sampled mixtures never beat the reported optimum (" +
                                       std::to_string(tested) + " samples)");
  }

  if (report.classification == Classification::Unbounded) {
    const auto& seq = report.witness->sequence;
    bool monotone = seq.size() >= 3;
    for (std::size_t i = 1; i < seq.size(); ++i)
      monotone = monotone && (loaded.config.direction == Direction::Max
                                  ? seq[i].value > seq[i - 1].value
                                  : seq[i].value < seq[i - 1].value);
    check(monotone, "witness values are strictly monotone with >= 3 entries");
    check(std::fabs(seq.back().value) >= loaded.config.divergence_threshold,
          "witness crosses the divergence threshold");
    bool realizable = true;
    for (const WitnessEntry& e : seq)
      realizable =
          realizable && functional_value(p, e.alpha, degenerate(p.U, e.u)) == e.value;
    check(realizable, "each witness entry is realized by its degenerate measure");
  }

  if (!opt.report_path.empty()) {
    const Json stored = read_json_file(opt.report_path);
    if (!stored.contains("result")) throw SchemaError("report file has no \"result\" subtree");
    LoadedProblem reloaded = load_problem_file(opt.path);
    if (stored.contains("seed")) reloaded.config.seed = stored["seed"].get<std::uint64_t>();
    const SolveReport fresh = optimize(reloaded.problem, reloaded.config);
    const Json fresh_json =
        report_to_json(fresh, problem_to_json(reloaded.problem, reloaded.config), reloaded.config, 0.0);
    check(canonical_dump(stored["result"]) == canonical_dump(fresh_json["result"]),
          "stored result subtree matches an independent re-run byte for byte");
  }

  std::cout << (failures == 0 ? "verification passed\n" : "verification FAILED\n");
  return failures == 0 ? 0 : 1;
}

struct LemmaOptions {
  std::string path;
  std::size_t samples = 100;
  std::size_t alphas = 100;
  std::size_t atoms = 5;
  std::optional<std::uint64_t> seed;
  double tol = 1e-9;
};

int run_lemma_check(const LemmaOptions& opt) {
  LoadedProblem loaded = load_problem_file(opt.path);
  resolve_seed(opt.seed, loaded);
  const ProblemDefinition& p = loaded.problem;

  const BoundReport bounds = check_mixture_range_bound(p, opt.alphas, opt.samples, opt.atoms,
                                          loaded.config.seed, opt.tol,
                                          loaded.config.truncation_bound);
  std::cout << "mixture-range bound: " << (bounds.holds() ? "holds" : "VIOLATED") << "\n"
            << "  parameters sampled:   " << bounds.instances_checked << "\n"
            << "  mixtures per sample:  " << bounds.samples_per_instance << "\n"
            << "  violations:           " << bounds.violations_count << "\n"
            << "  skipped:              " << bounds.skipped << "\n"
            << "  max violation:        " << format_double(bounds.max_violation) << "\n"
            << "  tolerance:            " << format_double(bounds.tolerance) << "\n";

  bool lemma2_ok = true;
  const SolveReport report = optimize(p, loaded.config);
  if (report.classification == Classification::Attained ||
      report.classification == Classification::EpsilonOptimal) {
    lemma2_ok = check_degenerate_dominance(p, loaded.config);
    std::cout << "degenerate-vs-mixture extreme: " << (lemma2_ok ? "holds" : "VIOLATED") << "\n";
  } else {
    std::cout << "degenerate-vs-mixture extreme: skipped (classification "
              << to_string(report.classification) << ")\n";
  }
  return bounds.holds() && lemma2_ok ? 0 : 1;
}

struct CatalogOptions {
  std::string name;
  std::string export_path;
};

int run_catalog(const CatalogOptions& opt) {
  if (opt.name.empty()) {
    for (const std::string& name : catalog_list()) std::cout << name << "\n";
    return 0;
  }
  const CatalogEntry& entry = catalog_get(opt.name);
  if (!opt.export_path.empty()) {
    write_file_atomic(opt.export_path,
                      canonical_dump(problem_to_json(entry.problem, entry.default_config())));
    std::cout << "wrote " << opt.export_path << "\n";
    return 0;
  }
  std::cout << "name:      " << entry.name << "\n"
            << "A:         " << to_string(entry.problem.A) << "\n"
            << "B:         " << to_string(entry.problem.B) << "\n"
            << "sign_B:    " << to_string(entry.problem.declared_sign_B) << "\n"
            << "direction: " << to_string(entry.direction) << "\n";
  if (entry.known_solution) {
    std::cout << "known:     " << to_string(entry.known_solution->classification);
    if (entry.known_solution->value)
      std::cout << ", value " << format_double(*entry.known_solution->value);
    if (entry.known_solution->alpha)
      std::cout << ", alpha " << format_point(*entry.known_solution->alpha);
    if (entry.known_solution->u) std::cout << ", u " << format_point(*entry.known_solution->u);
    std::cout << "\n";
  }
  std::cout << "notes:     " << entry.notes << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"extrema of parametric linear-fractional integral functionals "
               "over probability measures"};
  app.require_subcommand(1);

  SolveOptions solve_opt;
  CLI::App* solve = app.add_subcommand("solve", "solve a problem file and write a report");
  solve->add_option("file", solve_opt.path, "problem file (JSON)")->required();
  solve->add_option("--direction", solve_opt.direction, "override direction (max|min)");
  solve->add_option("--epsilon", solve_opt.epsilon, "epsilon for certificates");
  solve->add_option("--seed", solve_opt.seed, "seed for all stochastic subroutines");
  solve->add_option("--grid", solve_opt.grid, "grid points per dimension");
  solve->add_option("--multistarts", solve_opt.multistarts, "pattern-search starts");
  solve->add_option("--out", solve_opt.out_path, "write the JSON report here");
  solve->add_option("--format", solve_opt.format, "stdout format: text|json")
      ->check(CLI::IsMember({"text", "json"}));

  VerifyOptions verify_opt;
  CLI::App* verify = app.add_subcommand("verify", "cross-check a solve against the oracle");
  verify->add_option("file", verify_opt.path, "problem file (JSON)")->required();
  verify->add_option("--seed", verify_opt.seed, "seed override");
  verify->add_option("--samples", verify_opt.samples, "dominance samples");
  verify->add_option("--tol", verify_opt.tol, "agreement tolerance");
  verify->add_option("--report", verify_opt.report_path, "existing report to validate");

  LemmaOptions lemma_opt;
  CLI::App* lemma = app.add_subcommand("lemma-check", "empirical bound checks on a problem");
  lemma->add_option("file", lemma_opt.path, "problem file (JSON)")->required();
  lemma->add_option("--samples", lemma_opt.samples, "mixtures per sampled parameter");
  lemma->add_option("--alphas", lemma_opt.alphas, "sampled parameter count");
  lemma->add_option("--atoms", lemma_opt.atoms, "max atoms per mixture");
  lemma->add_option("--seed", lemma_opt.seed, "seed override");
  lemma->add_option("--tol", lemma_opt.tol, "bound tolerance");

  CatalogOptions catalog_opt;
  CLI::App* cat = app.add_subcommand("catalog", "list or export built-in problems");
  cat->add_option("name", catalog_opt.name, "entry name (omit to list)");
  cat->add_option("--export", catalog_opt.export_path, "write the entry as a problem file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve(solve_opt);
    if (verify->parsed()) return run_verify(verify_opt);
    if (lemma->parsed()) return run_lemma_check(lemma_opt);
    if (cat->parsed()) return run_catalog(catalog_opt);
  } catch (const fracopt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
