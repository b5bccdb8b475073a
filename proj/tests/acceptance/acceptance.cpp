// Acceptance suite: `acceptance --criterion N` runs one criterion, no argument runs all.
// Each criterion prints a single "criterion N: PASS|FAIL ..." line and sets the exit status.

#include "stabpencil.hpp"
#include "stabpencil/experiments.hpp"
#include "stabpencil/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace stabpencil;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

constexpr double kSeedBudget = 60.0; // seconds per seed for the worked examples
constexpr int kSeeds = 5;

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

std::string fixture(const std::string &name) { return std::string(STABPENCIL_FIXTURE_DIR) + "/" + name; }

// Best squared distance over seeds 0..kSeeds-1, each a time-budgeted multistart session.
template <typename Scalar>
double best_over_seeds(StabilityRegion region, const Pencil<Scalar> &P, const std::string &label) {
  double best = std::numeric_limits<double>::infinity();
  for (int seed = 0; seed < kSeeds; ++seed) {
    SolveOptions<Scalar> opts;
    opts.init = InitKind::Random;
    opts.seed = static_cast<std::uint64_t>(seed);
    opts.max_time = kSeedBudget;
    const auto rep = solve_multistart(region, P, opts);
    const auto res = recover_minimizer(region, P, rep.minimizer);
    const auto verdict = verify_stability(region, res, 0.0);
    std::cout << "  " << label << " seed " << seed << ": squared distance " << fmt(rep.objective_value, 8) << " ("
              << rep.starts << " starts, " << to_string(verdict) << ")\n";
    if (verdict != StabilityVerdict::Violation) best = std::min(best, rep.objective_value);
  }
  return best;
}

Outcome criterion_1() {
  const double best = best_over_seeds(StabilityRegion::Hurwitz, gen_grcar<double>(20), "grcar hurwitz real");
  return {best <= 2.05, "grcar n=20 hurwitz real best squared distance " + fmt(best) + " (bound 2.05)"};
}

Outcome criterion_2() {
  const double best = best_over_seeds(StabilityRegion::Schur, gen_grcar<Complex>(20), "grcar schur complex");
  return {best <= 1.91, "grcar n=20 schur best squared distance " + fmt(best) + " (bound 1.91)"};
}

Outcome criterion_3() {
  const AnyPencil P = read_pencil_file(fixture("oscillator_n10_eps0.1.json"));
  const double hurwitz = best_over_seeds(StabilityRegion::Hurwitz, as_real(P), "oscillator hurwitz real");
  const double schur = best_over_seeds(StabilityRegion::Schur, as_complex(P), "oscillator schur complex");
  return {hurwitz <= 1.05 && schur <= 1.06,
          "oscillator hurwitz " + fmt(hurwitz) + " (bound 1.05), schur " + fmt(schur) + " (bound 1.06)"};
}

Outcome criterion_4() {
  ExperimentConfig cfg;
  cfg.region = StabilityRegion::Hurwitz;
  cfg.field = Field::Complex;
  cfg.init = InitKind::Identity;
  cfg.samples = 20;
  cfg.per_run_budget = 10.0;
  const auto rows = experiment_size_sweep({10}, cfg);
  const double ratio = rows.at(0).mean_relative_distance;
  const bool a = rows[0].failures == 0 && ratio >= 0.03 && ratio <= 0.08;
  std::cout << "  (a) n=10 complex: mean distance/norm " << fmt(ratio) << " over " << rows[0].sample_count
            << " samples, " << rows[0].failures << " failures\n";

  ExperimentConfig jc = cfg;
  jc.init = InitKind::Random;
  jc.samples = 100;
  const JordanStats s = experiment_jordan_stats(5, jc);
  const bool b = s.fraction >= 0.6;
  std::cout << "  (b) n=5 complex: " << s.nontrivial << "/" << (s.samples - s.failures)
            << " minimizers with a nontrivial Jordan chain, " << s.singular << " singular\n";
  return {a && b, "(a) ratio " + fmt(ratio) + " in [0.03, 0.08]: " + (a ? "yes" : "no") + "; (b) fraction " +
                      fmt(s.fraction) + " >= 0.6: " + (b ? "yes" : "no")};
}

// True when some rotated diagonal entry sits close to a kink of the projection.
template <typename Scalar>
bool near_kink(StabilityRegion region, const Pencil<Scalar> &P, const GroupPair<Scalar> &G, double margin) {
  const auto ev = evaluate(region, P, G);
  for (Index i = 0; i < P.size(); ++i) {
    const ScalarPencil s = diagonal_entry(ev.rotated, i);
    const double n2 = s.norm_sq();
    if (region == StabilityRegion::Hurwitz) {
      const double c = hurwitz_pairing(s);
      if (std::abs(c) <= margin * n2) return true;
      if (c < 0.0 && std::abs(n2 / (2.0 * c) + 1.0) <= margin) return true;
    } else {
      if (std::abs(std::abs(s.a) - std::abs(s.b)) <= margin * std::sqrt(n2)) return true;
      if (std::abs(s.b) <= margin * std::sqrt(n2)) return true;
    }
  }
  return false;
}

template <typename Scalar>
void derivative_points(StabilityRegion region, Index n, std::mt19937_64 &rng, double &worst_g, double &worst_h,
                       int &resampled) {
  int done = 0;
  while (done < 20) {
    const Pencil<Scalar> P{gaussian_matrix<Scalar>(n, n, rng), gaussian_matrix<Scalar>(n, n, rng)};
    const auto G = random_point<Scalar>(n, rng);
    if (near_kink(region, P, G, 1e-3)) {
      ++resampled;
      continue;
    }
    worst_g = std::max(worst_g, gradient_check(region, P, G, 5, rng));
    worst_h = std::max(worst_h, hessian_check(region, P, G, 5, rng));
    ++done;
  }
}

Outcome criterion_5() {
  std::mt19937_64 rng(2024);
  double worst_g = 0.0, worst_h = 0.0;
  int resampled = 0;
  for (auto region : {StabilityRegion::Hurwitz, StabilityRegion::Schur})
    for (Index n : {3, 5, 8}) {
      double g = 0.0, h = 0.0;
      derivative_points<Complex>(region, n, rng, g, h, resampled);
      derivative_points<double>(region, n, rng, g, h, resampled);
      std::cout << "  " << to_string(region) << " n=" << n << ": gradient " << fmt(g, 3) << ", hessian " << fmt(h, 3)
                << "\n";
      worst_g = std::max(worst_g, g);
      worst_h = std::max(worst_h, h);
    }
  return {worst_g < 1e-6 && worst_h < 1e-4, "worst gradient error " + fmt(worst_g, 3) + " (< 1e-6), worst hessian error " +
                                                fmt(worst_h, 3) + " (< 1e-4), " + std::to_string(resampled) +
                                                " points resampled near kinks"};
}

// Distance from s to the boundary of the stable set over its angular parameters, with the
// radial parameters solved exactly: a dense grid followed by shrinking local grids.
double hurwitz_boundary_distance(const ScalarPencil &s, double phi) {
  // Boundary points (rho u, i sigma u) with |u| = 1, rho >= 0, sigma real.
  const Complex u = std::polar(1.0, phi);
  const double rho = std::max(0.0, (std::conj(u) * s.a).real());
  const double sigma = (std::conj(Complex(0.0, 1.0) * u) * s.b).real();
  return (s - ScalarPencil{rho * u, Complex(0.0, sigma) * u}).norm();
}

double schur_boundary_distance(const ScalarPencil &s, double phi, double psi) {
  // Boundary points (r u, r v) with |u| = |v| = 1, r >= 0.
  const Complex u = std::polar(1.0, phi), v = std::polar(1.0, psi);
  const double r = std::max(0.0, 0.5 * ((std::conj(u) * s.a).real() + (std::conj(v) * s.b).real()));
  return (s - ScalarPencil{r * u, r * v}).norm();
}

double boundary_oracle(StabilityRegion region, const ScalarPencil &s) {
  const double two_pi = 2.0 * M_PI;
  if (region == StabilityRegion::Hurwitz) {
    const int steps = 4000;
    double best = std::numeric_limits<double>::infinity(), at = 0.0;
    for (int k = 0; k < steps; ++k) {
      const double phi = two_pi * k / steps;
      const double d = hurwitz_boundary_distance(s, phi);
      if (d < best) best = d, at = phi;
    }
    for (double span = two_pi / steps; span > 1e-13; span /= 8.0) {
      const double centre = at;
      for (int k = -16; k <= 16; ++k) {
        const double phi = centre + span * k / 16.0;
        const double d = hurwitz_boundary_distance(s, phi);
        if (d < best) best = d, at = phi;
      }
    }
    return best;
  }
  const int steps = 200;
  double best = std::numeric_limits<double>::infinity(), at_phi = 0.0, at_psi = 0.0;
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j < steps; ++j) {
      const double phi = two_pi * i / steps, psi = two_pi * j / steps;
      const double d = schur_boundary_distance(s, phi, psi);
      if (d < best) best = d, at_phi = phi, at_psi = psi;
    }
  for (double span = two_pi / steps; span > 1e-13; span /= 8.0) {
    const double cphi = at_phi, cpsi = at_psi;
    for (int i = -8; i <= 8; ++i)
      for (int j = -8; j <= 8; ++j) {
        const double phi = cphi + span * i / 8.0, psi = cpsi + span * j / 8.0;
        const double d = schur_boundary_distance(s, phi, psi);
        if (d < best) best = d, at_phi = phi, at_psi = psi;
      }
  }
  return best;
}

Outcome criterion_6() {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  bool ok = true;
  std::ostringstream detail;
  for (auto region : {StabilityRegion::Hurwitz, StabilityRegion::Schur}) {
    double worst_excess = -std::numeric_limits<double>::infinity();
    double worst_consistency = 0.0, worst_formula = 0.0, worst_gap = 0.0;
    int unstable = 0;
    for (int k = 0; k < 1000; ++k) {
      const ScalarPencil s{Complex(g(rng), g(rng)), Complex(g(rng), g(rng))};
      const auto r = project(region, s);
      const double direct = (s - r.projected).norm();
      worst_consistency = std::max(worst_consistency, std::abs(direct - r.residual_distance) / std::max(1e-300, direct));
      if (is_stable_scalar(region, s)) {
        worst_excess = std::max(worst_excess, r.residual_distance);
        continue;
      }
      ++unstable;
      // Closed-form distance formulas evaluated independently of project().
      double formula;
      if (region == StabilityRegion::Hurwitz) {
        const double c = hurwitz_pairing(s);
        const double alpha = s.norm_sq() / (2.0 * c);
        const double lambda = 1.0 / (alpha - std::sqrt(alpha * alpha - 1.0));
        formula = std::sqrt(c * lambda);
      } else {
        formula = (std::abs(s.a) - std::abs(s.b)) / std::sqrt(2.0);
      }
      worst_formula = std::max(worst_formula, std::abs(formula - direct) / direct);
      const double oracle = boundary_oracle(region, s);
      worst_excess = std::max(worst_excess, r.residual_distance - oracle);
      worst_gap = std::max(worst_gap, oracle - r.residual_distance);
    }
    const bool pass = worst_excess <= 1e-6 && worst_consistency <= 1e-12 && worst_formula <= 1e-12;
    ok = ok && pass;
    std::cout << "  " << to_string(region) << ": " << unstable << " unstable inputs, max(residual - oracle) "
              << fmt(worst_excess, 3) << ", oracle slack " << fmt(worst_gap, 3) << ", residual consistency "
              << fmt(worst_consistency, 3) << ", formula agreement " << fmt(worst_formula, 3) << "\n";
    detail << to_string(region) << " excess " << fmt(worst_excess, 3) << " formula " << fmt(worst_formula, 3) << "; ";
  }
  return {ok, detail.str()};
}

Outcome criterion_7() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> size(2, 10);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Index n = size(rng);
    const auto region = k % 2 == 0 ? StabilityRegion::Hurwitz : StabilityRegion::Schur;
    const Pencil<Complex> P{gaussian_matrix<Complex>(n, n, rng), gaussian_matrix<Complex>(n, n, rng)};
    const auto G = random_point<Complex>(n, rng);
    const double value = evaluate(region, P, G).value;
    const auto res = recover_minimizer(region, P, G);
    const double d2 = norm_sq(P - res.pencil);
    worst = std::max(worst, std::abs(d2 - value) / value);
  }
  return {worst <= 1e-10, "worst relative gap between distance^2 and objective " + fmt(worst, 3) + " (<= 1e-10)"};
}

struct InvariantTally {
  int runs = 0, monotone_failures = 0, unitarity_failures = 0, violations = 0, singular = 0, regularize_failures = 0;
};

template <typename Scalar>
void check_run(StabilityRegion region, const Pencil<Scalar> &P, SolveOptions<Scalar> opts, InvariantTally &t) {
  bool unitary = true;
  opts.observer = [&](const GroupPair<Scalar> &G) { unitary = unitary && is_on_manifold(G, 1e-10); };
  const auto rep = solve(region, P, opts);
  ++t.runs;
  double last = std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (const auto &e : rep.trace) {
    if (!e.step_accepted) continue;
    if (e.f > last) monotone = false;
    last = e.f;
  }
  if (!monotone) ++t.monotone_failures;
  if (!unitary) ++t.unitarity_failures;

  const auto res = recover_minimizer(region, P, rep.minimizer);
  const auto verdict = verify_stability(region, res, 0.0);
  if (verdict == StabilityVerdict::Violation) ++t.violations;
  if (verdict == StabilityVerdict::SingularClosurePoint) {
    ++t.singular;
    const double delta = kDefaultRegularization * std::max(1.0, std::sqrt(norm_sq(P)));
    const auto R = regularize_singular(region, res, delta);
    const Pencil<Scalar> tri = regularized_triangular(res, delta);
    const double extra = distance(R, res.pencil);
    const bool ok = verify_stability(region, tri, 0.0) == StabilityVerdict::Stable &&
                    extra <= delta * std::sqrt(static_cast<double>(P.size())) * (1.0 + 1e-6);
    if (!ok) ++t.regularize_failures;
  }
}

Outcome criterion_8() {
  InvariantTally t;
  std::mt19937_64 rng(8);
  for (auto region : {StabilityRegion::Hurwitz, StabilityRegion::Schur})
    for (Index n : {3, 5, 8})
      for (auto init : {InitKind::Identity, InitKind::Random}) {
        SolveOptions<Complex> oc;
        oc.init = init;
        oc.seed = 100 + static_cast<std::uint64_t>(n);
        oc.max_iter = 300;
        check_run(region, Pencil<Complex>{gaussian_matrix<Complex>(n, n, rng), gaussian_matrix<Complex>(n, n, rng)},
                  oc, t);
        SolveOptions<double> orr;
        orr.init = init;
        orr.seed = 200 + static_cast<std::uint64_t>(n);
        orr.max_iter = 300;
        check_run(region, Pencil<double>{gaussian_matrix<double>(n, n, rng), gaussian_matrix<double>(n, n, rng)}, orr,
                  t);
      }
  // Rank-deficient and singular inputs, which tend to produce singular closure points.
  for (auto region : {StabilityRegion::Hurwitz, StabilityRegion::Schur}) {
    std::mt19937_64 g(9);
    check_run(region, truncate_rank(gen_gaussian<double>(6, g), 1), SolveOptions<double>{}, t);
    Eigen::MatrixXd A(3, 3), B(3, 3);
    A << 1, 2, 3, 0, 0, 4, 0, 0, -1;
    B << 1, 5, 6, 0, 0, 7, 0, 0, 2;
    check_run(region, Pencil<double>{A, B}, SolveOptions<double>{}, t);
    check_run(region, Pencil<Complex>::Zero(2), SolveOptions<Complex>{}, t);
  }
  const bool ok = t.monotone_failures == 0 && t.unitarity_failures == 0 && t.violations == 0 && t.regularize_failures == 0 &&
                  t.singular > 0;
  return {ok, std::to_string(t.runs) + " runs: " + std::to_string(t.monotone_failures) + " non-monotone, " +
                  std::to_string(t.unitarity_failures) + " off-manifold, " + std::to_string(t.violations) +
                  " violations, " + std::to_string(t.singular) + " singular outputs, " +
                  std::to_string(t.regularize_failures) + " failed regularizations"};
}

Outcome criterion_9() {
  ExperimentConfig cfg;
  cfg.region = StabilityRegion::Hurwitz;
  cfg.field = Field::Real;
  cfg.init = InitKind::Identity;
  cfg.samples = 10;
  cfg.per_run_budget = 10.0;
  const auto rows = experiment_size_sweep({4, 8, 12, 16, 20, 24, 30}, cfg);
  const std::string dat = format_dat(rows);
  std::ofstream("size_sweep.dat") << dat;
  std::cout << dat;
  std::vector<DatRow> parsed;
  try {
    parsed = parse_dat(dat);
  } catch (const ParseError &e) {
    return {false, std::string("dat does not parse: ") + e.what()};
  }
  bool ascending = parsed.size() == 7;
  bool in_range = true;
  int failures = 0;
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    if (i > 0 && parsed[i].index <= parsed[i - 1].index) ascending = false;
    if (!(parsed[i].value > 0.0 && parsed[i].value < 0.5)) in_range = false;
  }
  for (const auto &r : rows) failures += r.failures;
  return {ascending && in_range && failures == 0,
          std::to_string(parsed.size()) + " rows, ascending index: " + (ascending ? "yes" : "no") +
              ", all means in (0, 0.5): " + (in_range ? "yes" : "no") + ", failed samples " + std::to_string(failures)};
}

} // namespace

int main(int argc, char **argv) {
  const std::map<int, std::function<Outcome()>> criteria{
      {1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {4, criterion_4}, {5, criterion_5},
      {6, criterion_6}, {7, criterion_7}, {8, criterion_8}, {9, criterion_9}};

  std::vector<int> selected;
  if (argc == 3 && std::strcmp(argv[1], "--criterion") == 0) {
    selected.push_back(std::atoi(argv[2]));
  } else if (argc == 1) {
    for (const auto &kv : criteria) selected.push_back(kv.first);
  } else {
    std::cerr << "usage: acceptance [--criterion N]\n";
    return 2;
  }

  bool all = true;
  for (int id : selected) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    Outcome o;
    try {
      o = it->second();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " " << o.detail << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
