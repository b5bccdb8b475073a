#include "stabpencil/experiments.hpp"

#include "stabpencil/analysis.hpp"
#include "stabpencil/generators.hpp"
#include "stabpencil/io.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <thread>

namespace stabpencil {

namespace {

/// Runs task(i) for i in [0, count) on a small worker pool; results land in index order.
void parallel_for(int count, int threads, const std::function<void(int)> &task) {
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) task(i);
    });
  for (auto &t : pool) t.join();
}

template <typename Scalar>
SampleOutcome solve_sample(const Pencil<Scalar> &P, const ExperimentConfig &cfg, std::uint64_t seed, bool analyse) {
  SampleOutcome out;
  out.input_norm = std::sqrt(norm_sq(P));
  try {
    SolveOptions<Scalar> opts;
    opts.init = cfg.init;
    opts.seed = seed;
    opts.max_time = cfg.per_run_budget;
    opts.max_iter = cfg.max_iter;
    const SolveReport<Scalar> rep = solve(cfg.region, P, opts);
    out.distance = std::sqrt(rep.objective_value);
    out.wall_time = rep.wall_time;
    if (analyse) {
      const MinimizerResult<Scalar> res = recover_minimizer(cfg.region, P, rep.minimizer);
      out.singular = res.is_singular;
      out.nontrivial_chain = jordan_structure(res).has_nontrivial_chain;
    }
    out.ok = true;
  } catch (const std::exception &e) {
    out.error = e.what();
  }
  return out;
}

template <typename Scalar>
Pencil<Scalar> sample_pencil(int n, std::uint64_t seed, int rank) {
  std::mt19937_64 rng(seed);
  Pencil<Scalar> P = gen_gaussian<Scalar>(n, rng);
  return rank >= 0 ? truncate_rank(P, rank) : P;
}

SampleOutcome run_sample(int n, int rank, std::uint64_t seed, const ExperimentConfig &cfg, bool analyse) {
  if (cfg.field == Field::Real) return solve_sample(sample_pencil<double>(n, seed, rank), cfg, seed, analyse);
  return solve_sample(sample_pencil<Complex>(n, seed, rank), cfg, seed, analyse);
}

ExperimentRow aggregate(int index, const std::vector<SampleOutcome> &outcomes) {
  ExperimentRow row;
  row.index = index;
  double dist = 0.0, rel = 0.0, time = 0.0;
  for (const auto &o : outcomes) {
    if (!o.ok) {
      ++row.failures;
      continue;
    }
    ++row.sample_count;
    dist += o.distance;
    rel += o.input_norm > 0.0 ? o.distance / o.input_norm : 0.0;
    time += o.wall_time;
  }
  if (row.sample_count > 0) {
    row.mean_distance = dist / row.sample_count;
    row.mean_relative_distance = rel / row.sample_count;
    row.mean_wall_time = time / row.sample_count;
  }
  return row;
}

std::vector<ExperimentRow> sweep(int n_fixed, const std::vector<int> &indices, bool by_rank, const ExperimentConfig &cfg) {
  if (cfg.samples < 1) throw ValidationError("experiment: samples must be positive");
  std::vector<int> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  const int threads = experiment_threads(cfg.threads);
  std::vector<ExperimentRow> rows;
  for (int idx : sorted) {
    const int n = by_rank ? n_fixed : idx;
    const int rank = by_rank ? idx : -1;
    if (n < 1) throw ValidationError("experiment: sizes must be positive");
    if (by_rank && (rank < 0 || rank > n)) throw ValidationError("experiment: rank out of range");
    std::vector<SampleOutcome> outcomes(static_cast<std::size_t>(cfg.samples));
    parallel_for(cfg.samples, threads, [&](int i) {
      outcomes[static_cast<std::size_t>(i)] = run_sample(n, rank, cfg.seed + static_cast<std::uint64_t>(i), cfg, false);
    });
    rows.push_back(aggregate(idx, outcomes));
  }
  return rows;
}

} // namespace

int experiment_threads(int requested) {
  if (requested > 0) return requested;
  if (const char *env = std::getenv("OMEGA_STAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<ExperimentRow> experiment_size_sweep(const std::vector<int> &sizes, const ExperimentConfig &cfg) {
  return sweep(0, sizes, false, cfg);
}

std::vector<ExperimentRow> experiment_rank_sweep(int n, const std::vector<int> &ranks, const ExperimentConfig &cfg) {
  if (n < 1) throw ValidationError("experiment: n must be positive");
  return sweep(n, ranks, true, cfg);
}

JordanStats experiment_jordan_stats(int n, const ExperimentConfig &cfg) {
  if (n < 1) throw ValidationError("experiment: n must be positive");
  if (cfg.samples < 1) throw ValidationError("experiment: samples must be positive");
  std::vector<SampleOutcome> outcomes(static_cast<std::size_t>(cfg.samples));
  parallel_for(cfg.samples, experiment_threads(cfg.threads), [&](int i) {
    outcomes[static_cast<std::size_t>(i)] = run_sample(n, -1, cfg.seed + static_cast<std::uint64_t>(i), cfg, true);
  });
  JordanStats s;
  s.samples = cfg.samples;
  double rel = 0.0;
  for (const auto &o : outcomes) {
    if (!o.ok) {
      ++s.failures;
      continue;
    }
    s.nontrivial += o.nontrivial_chain ? 1 : 0;
    s.singular += o.singular ? 1 : 0;
    rel += o.input_norm > 0.0 ? o.distance / o.input_norm : 0.0;
  }
  const int ok = s.samples - s.failures;
  if (ok > 0) {
    s.fraction = static_cast<double>(s.nontrivial) / ok;
    s.mean_relative_distance = rel / ok;
  }
  return s;
}

std::string format_dat(const std::vector<ExperimentRow> &rows) {
  std::vector<ExperimentRow> sorted = rows;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto &a, const auto &b) { return a.index < b.index; });
  std::ostringstream out;
  for (const auto &r : sorted) out << r.index << ' ' << format_double(r.mean_distance) << '\n';
  return out.str();
}

std::vector<DatRow> parse_dat(const std::string &text) {
  std::vector<DatRow> rows;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    DatRow r;
    std::string extra;
    if (!(ls >> r.index >> r.value) || (ls >> extra))
      throw ParseError("malformed .dat line " + std::to_string(lineno) + ": '" + line + "'");
    rows.push_back(r);
  }
  return rows;
}

} // namespace stabpencil
