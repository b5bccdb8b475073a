#include "stabpencil/cli.hpp"

#include "stabpencil/analysis.hpp"
#include "stabpencil/experiments.hpp"
#include "stabpencil/generators.hpp"
#include "stabpencil/io.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <limits>
#include <optional>

namespace stabpencil {

namespace {

struct SolveArgs {
  std::string input;
  std::string output;
  std::string region = "hurwitz";
  std::string field;
  std::string init = "identity";
  int restarts = 1;
  std::uint64_t seed = 0;
  int max_iter = 1000;
  double max_time = std::numeric_limits<double>::infinity();
  std::optional<double> grad_tol;
  std::optional<double> delta;
  double tol = kEigenvalueTol;
};

struct ProjectArgs {
  std::string region = "hurwitz";
  double a_re = 0.0, a_im = 0.0, b_re = 0.0, b_im = 0.0;
};

struct GenerateArgs {
  std::string kind = "grcar";
  int n = 20;
  double eps = 0.1;
  std::string field = "real";
  std::uint64_t seed = 0;
  std::optional<int> rank;
  std::string output;
};

struct ExperimentArgs {
  std::string kind = "size-sweep";
  std::vector<int> sizes{4, 8, 12, 16, 20, 24, 30};
  std::vector<int> ranks;
  int n = 20;
  int samples = 10;
  double max_time = 10.0;
  int max_iter = 1000;
  std::string region = "hurwitz";
  std::string field;
  std::string init;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string output;
};

template <typename Scalar>
SolveRecord<Scalar> run_solve(const Pencil<Scalar> &P, const SolveArgs &a) {
  const StabilityRegion region = parse_region(a.region);
  if (a.restarts < 1) throw ValidationError("--restarts must be at least 1");
  SolveOptions<Scalar> opts;
  opts.init = parse_init(a.init);
  opts.max_iter = a.max_iter;
  opts.max_time = a.max_time;
  opts.grad_tol = a.grad_tol;

  // Restart k uses seed + k; after the first, identity-initialized sessions switch to random starts.
  SolveReport<Scalar> best;
  for (int k = 0; k < a.restarts; ++k) {
    SolveOptions<Scalar> o = opts;
    o.seed = a.seed + static_cast<std::uint64_t>(k);
    if (k > 0 && o.init == InitKind::Identity) o.init = InitKind::Random;
    SolveReport<Scalar> r = solve_multistart(region, P, o);
    if (k == 0 || r.objective_value < best.objective_value) best = std::move(r);
  }

  SolveRecord<Scalar> rec;
  rec.region = region;
  rec.input = P;
  rec.report = std::move(best);
  rec.result = recover_minimizer(region, P, rec.report.minimizer);
  rec.stability = verify_stability(region, rec.result, 0.0);
  rec.jordan = jordan_structure(rec.result, a.tol);
  if (rec.result.is_singular) {
    const double delta = a.delta.value_or(kDefaultRegularization * std::max(1.0, std::sqrt(norm_sq(P))));
    rec.regularized = regularize_singular(region, rec.result, delta);
  }
  return rec;
}

template <typename Scalar>
void report_solve(const SolveRecord<Scalar> &rec, const SolveArgs &a, std::ostream &out) {
  const nlohmann::json j = record_to_json(rec);
  if (!a.output.empty()) write_text(a.output, j.dump(1) + "\n");
  out << "region " << to_string(rec.region) << "\n"
      << "field " << to_string(field_of<Scalar>) << "\n"
      << "squared_distance " << format_double(rec.result.squared_distance) << "\n"
      << "distance " << format_double(std::sqrt(rec.result.squared_distance)) << "\n"
      << "stability " << to_string(rec.stability) << "\n"
      << "nontrivial_jordan_chain " << (rec.jordan.has_nontrivial_chain ? "yes" : "no") << "\n"
      << "stop_reason " << to_string(rec.report.stop_reason) << "\n"
      << "iterations " << rec.report.iterations << "\n"
      << "starts " << rec.report.starts << "\n";
}

int cmd_solve(const SolveArgs &a, std::ostream &out) {
  const AnyPencil P = read_pencil_file(a.input);
  const Field field = a.field.empty() ? std::visit([](const auto &p) { return p.field(); }, P) : parse_field(a.field);
  if (field == Field::Real) {
    report_solve(run_solve(as_real(P), a), a, out);
  } else {
    report_solve(run_solve(as_complex(P), a), a, out);
  }
  return kExitOk;
}

int cmd_project(const ProjectArgs &a, std::ostream &out) {
  const StabilityRegion region = parse_region(a.region);
  const ScalarPencil s{Complex(a.a_re, a.a_im), Complex(a.b_re, a.b_im)};
  out << projection_to_json(s, project(region, s)).dump(1) << "\n";
  return kExitOk;
}

int cmd_generate(const GenerateArgs &a, std::ostream &out) {
  const Field field = parse_field(a.field);
  AnyPencil P;
  const auto make = [&](auto tag) -> AnyPencil {
    using Scalar = decltype(tag);
    Pencil<Scalar> p;
    if (a.kind == "grcar") {
      p = gen_grcar<Scalar>(a.n);
    } else if (a.kind == "oscillator") {
      p = gen_oscillator<Scalar>(a.n, a.eps);
    } else if (a.kind == "gaussian") {
      std::mt19937_64 rng(a.seed);
      p = gen_gaussian<Scalar>(a.n, rng);
    } else {
      throw ParseError("unknown generator '" + a.kind + "' (expected grcar, oscillator or gaussian)");
    }
    if (a.rank) p = truncate_rank(p, *a.rank);
    return p;
  };
  P = field == Field::Real ? make(double{}) : make(Complex{});
  if (a.output.empty()) {
    out << std::visit([](const auto &p) { return pencil_to_json(p); }, P).dump(1) << "\n";
  } else {
    write_pencil_file(a.output, P);
  }
  return kExitOk;
}

int cmd_experiment(const ExperimentArgs &a, std::ostream &out) {
  ExperimentConfig cfg;
  cfg.region = parse_region(a.region);
  cfg.samples = a.samples;
  cfg.per_run_budget = a.max_time;
  cfg.max_iter = a.max_iter;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  const bool jordan = a.kind == "jordan";
  // Jordan statistics default to complex pencils with random starts; the sweeps to real with identity starts.
  cfg.field = parse_field(a.field.empty() ? (jordan ? "complex" : "real") : a.field);
  cfg.init = parse_init(a.init.empty() ? (jordan ? "random" : "identity") : a.init);

  if (jordan) {
    const JordanStats s = experiment_jordan_stats(a.n, cfg);
    std::ostringstream text;
    text << "samples " << s.samples << "\n"
         << "nontrivial " << s.nontrivial << "\n"
         << "singular " << s.singular << "\n"
         << "failures " << s.failures << "\n"
         << "fraction " << format_double(s.fraction) << "\n"
         << "mean_relative_distance " << format_double(s.mean_relative_distance) << "\n";
    if (!a.output.empty()) write_text(a.output, text.str());
    out << text.str();
    return kExitOk;
  }

  std::vector<ExperimentRow> rows;
  if (a.kind == "size-sweep") {
    rows = experiment_size_sweep(a.sizes, cfg);
  } else if (a.kind == "rank-sweep") {
    std::vector<int> ranks = a.ranks;
    if (ranks.empty())
      for (int r = 1; r < a.n; ++r) ranks.push_back(r);
    rows = experiment_rank_sweep(a.n, ranks, cfg);
  } else {
    throw ParseError("unknown experiment '" + a.kind + "' (expected size-sweep, rank-sweep or jordan)");
  }
  const std::string dat = format_dat(rows);
  if (!a.output.empty()) write_text(a.output, dat);
  out << dat;
  for (const auto &r : rows)
    if (r.failures > 0) out << "# index " << r.index << ": " << r.failures << " failed samples excluded\n";
  return kExitOk;
}

} // namespace

int run_command(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Nearest Hurwitz- or Schur-stable matrix pencil"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto *solve_cmd = app.add_subcommand("solve", "Find a nearest stable pencil to the pencil in --input");
  solve_cmd->add_option("--input", sa.input, "Pencil JSON file")->required();
  solve_cmd->add_option("--output", sa.output, "Result JSON file");
  solve_cmd->add_option("--region", sa.region, "hurwitz or schur");
  solve_cmd->add_option("--field", sa.field, "complex or real (default: field of the input file)");
  solve_cmd->add_option("--init", sa.init, "identity or random");
  solve_cmd->add_option("--restarts", sa.restarts, "Number of independent sessions");
  solve_cmd->add_option("--seed", sa.seed, "Base random seed");
  solve_cmd->add_option("--max-iter", sa.max_iter, "Trust-region iteration cap per start");
  solve_cmd->add_option("--max-time", sa.max_time, "Time budget per session in seconds");
  solve_cmd->add_option("--grad-tol", sa.grad_tol, "Riemannian gradient-norm threshold");
  solve_cmd->add_option("--delta", sa.delta, "Regularization size for singular minimizers");
  solve_cmd->add_option("--tol", sa.tol, "Rank and eigenvalue tolerance");

  ProjectArgs pa;
  auto *project_cmd = app.add_subcommand("project", "Project a scalar pencil a + xb onto the stable set");
  project_cmd->add_option("--region", pa.region, "hurwitz or schur");
  project_cmd->add_option("--a-re", pa.a_re);
  project_cmd->add_option("--a-im", pa.a_im);
  project_cmd->add_option("--b-re", pa.b_re);
  project_cmd->add_option("--b-im", pa.b_im);

  GenerateArgs ga;
  auto *generate_cmd = app.add_subcommand("generate", "Write a test pencil");
  generate_cmd->add_option("--kind", ga.kind, "grcar, oscillator or gaussian");
  generate_cmd->add_option("--n", ga.n, "Size (oscillator: number of masses)");
  generate_cmd->add_option("--eps", ga.eps, "Oscillator damping shift");
  generate_cmd->add_option("--field", ga.field, "complex or real");
  generate_cmd->add_option("--seed", ga.seed, "Random seed (gaussian)");
  generate_cmd->add_option("--rank", ga.rank, "Truncate B to this rank");
  generate_cmd->add_option("--output", ga.output, "Output file (default: stdout)");

  ExperimentArgs ea;
  auto *experiment_cmd = app.add_subcommand("experiment", "Statistical experiments on Gaussian pencils");
  experiment_cmd->add_option("--kind", ea.kind, "size-sweep, rank-sweep or jordan");
  experiment_cmd->add_option("--sizes", ea.sizes, "Sizes for size-sweep")->delimiter(',');
  experiment_cmd->add_option("--ranks", ea.ranks, "Ranks for rank-sweep (default 1..n-1)")->delimiter(',');
  experiment_cmd->add_option("--n", ea.n, "Size for rank-sweep and jordan");
  experiment_cmd->add_option("--samples", ea.samples, "Samples per point");
  experiment_cmd->add_option("--max-time", ea.max_time, "Time budget per solve in seconds");
  experiment_cmd->add_option("--max-iter", ea.max_iter, "Iteration cap per solve");
  experiment_cmd->add_option("--region", ea.region, "hurwitz or schur");
  experiment_cmd->add_option("--field", ea.field, "complex or real");
  experiment_cmd->add_option("--init", ea.init, "identity or random");
  experiment_cmd->add_option("--seed", ea.seed, "Base seed; sample i uses seed + i");
  experiment_cmd->add_option("--threads", ea.threads, "Worker threads (default: OMEGA_STAB_THREADS or cores)");
  experiment_cmd->add_option("--output", ea.output, "Output file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve_cmd) return cmd_solve(sa, out);
    if (*project_cmd) return cmd_project(pa, out);
    if (*generate_cmd) return cmd_generate(ga, out);
    if (*experiment_cmd) return cmd_experiment(ea, out);
  } catch (const IoError &e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError &e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ValidationError &e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

} // namespace stabpencil
