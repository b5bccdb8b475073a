#pragma once

#include "stabpencil/io.hpp"
#include "stabpencil/pencil.hpp"
#include "stabpencil/projection.hpp"
#include "stabpencil/trust_region.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace stabpencil {

struct ExperimentConfig {
  StabilityRegion region = StabilityRegion::Hurwitz;
  Field field = Field::Real;
  InitKind init = InitKind::Identity;
  int samples = 10;
  double per_run_budget = 10.0; // seconds, per solve
  int max_iter = 1000;
  std::uint64_t seed = 0;
  int threads = 0; // 0: OMEGA_STAB_THREADS, else hardware concurrency
};

/// One aggregated point of a sweep. `index` is the size n or the rank r.
struct ExperimentRow {
  int index = 0;
  double mean_distance = 0.0;          // mean of the (unsquared) distance
  double mean_relative_distance = 0.0; // mean of distance / ||input||_F
  int sample_count = 0;
  int failures = 0;
  double mean_wall_time = 0.0;
};

/// Outcome of one sample: either a solved instance or a recorded failure.
struct SampleOutcome {
  bool ok = false;
  double distance = 0.0;
  double input_norm = 0.0;
  double wall_time = 0.0;
  bool nontrivial_chain = false;
  bool singular = false;
  std::string error;
};

struct JordanStats {
  int samples = 0;
  int nontrivial = 0;
  int singular = 0;
  int failures = 0;
  double fraction = 0.0; // nontrivial / successful samples
  double mean_relative_distance = 0.0;
};

/// Worker count from OMEGA_STAB_THREADS, defaulting to the available cores.
int experiment_threads(int requested = 0);

/// Scaled Gaussian samples solved at each size. Sample i of a size uses seed + i.
std::vector<ExperimentRow> experiment_size_sweep(const std::vector<int> &sizes, const ExperimentConfig &cfg);

/// Size-n scaled Gaussian pencils whose B is truncated to each rank.
std::vector<ExperimentRow> experiment_rank_sweep(int n, const std::vector<int> &ranks, const ExperimentConfig &cfg);

/// Fraction of minimizers with a nontrivial Jordan chain.
JordanStats experiment_jordan_stats(int n, const ExperimentConfig &cfg);

/// `.dat` plot rows, one `<index> <value>` line per row, ascending index, 17 significant digits.
std::string format_dat(const std::vector<ExperimentRow> &rows);

struct DatRow {
  int index = 0;
  double value = 0.0;
};

std::vector<DatRow> parse_dat(const std::string &text);

} // namespace stabpencil
