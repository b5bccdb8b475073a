#pragma once

#include "stabpencil/manifold.hpp"
#include "stabpencil/objective.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace stabpencil {

enum class InitKind { Identity, Random, Provided };

enum class StopReason { GradTol, MaxIter, MaxTime };

inline std::string to_string(StopReason r) {
  switch (r) {
  case StopReason::GradTol: return "grad_tol";
  case StopReason::MaxIter: return "max_iter";
  case StopReason::MaxTime: return "max_time";
  }
  return "unknown";
}

/// Trust-region configuration. Unset optionals take size-dependent defaults at solve time:
/// delta_bar = sqrt(2n), delta0 = delta_bar / 8, grad_tol = 1e-8 * max(1, ||P||_F).
template <typename Scalar>
struct SolveOptions {
  int max_iter = 1000;
  double max_time = std::numeric_limits<double>::infinity(); // seconds
  std::optional<double> grad_tol;
  std::optional<double> delta_bar;
  std::optional<double> delta0;
  double rho_prime = 0.1;
  int tcg_max_inner = 0; // 0: manifold dimension
  double tcg_kappa = 0.1;
  double tcg_theta = 1.0;
  std::uint64_t seed = 0;
  InitKind init = InitKind::Identity;
  std::optional<GroupPair<Scalar>> provided;
  std::function<void(const GroupPair<Scalar> &)> observer; // called on the start point and every accepted iterate
};

struct TraceEntry {
  int iteration = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  double radius = 0.0;
  bool step_accepted = false;
};

template <typename Scalar>
struct SolveReport {
  GroupPair<Scalar> minimizer;
  double objective_value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  double wall_time = 0.0;
  std::vector<TraceEntry> trace;
  StopReason stop_reason = StopReason::MaxIter;
  int starts = 1; // number of starting points tried (solve_multistart)
};

enum class TcgStop { ZeroGradient, NegativeCurvature, ExceededTrustRegion, ReachedTarget, MaxInner };

template <typename Vec>
struct TcgResult {
  Vec step;
  Vec hess_step; // H applied to step, accumulated without extra products
  TcgStop reason = TcgStop::MaxInner;
  int inner_iterations = 0;
};

struct TcgOptions {
  int max_inner = 1000;
  double kappa = 0.1;
  double theta = 1.0;
};

/// Steihaug-Toint truncated conjugate gradient for
///   min <g, s> + 1/2 <H s, s>  subject to  ||s|| <= delta.
/// `Vec` needs +, -, scalar *, and `inner(Vec, Vec)`; `hess` maps Vec -> Vec.
template <typename Vec, typename Inner, typename Hess>
TcgResult<Vec> tcg_subproblem(const Vec &g, Hess &&hess, double delta, const TcgOptions &opts, Inner &&inner_fn) {
  TcgResult<Vec> out{g * 0.0, g * 0.0, TcgStop::MaxInner, 0};
  const double r0_sq = inner_fn(g, g);
  if (r0_sq == 0.0) {
    out.reason = TcgStop::ZeroGradient;
    return out;
  }
  const double norm_r0 = std::sqrt(r0_sq);
  const double delta_sq = delta * delta;

  Vec r = g;
  Vec dir = g * -1.0;
  double r_r = r0_sq;
  double e_Pe = 0.0; // <eta, eta>
  double e_Pd = 0.0; // <eta, dir>
  double d_Pd = r_r; // <dir, dir>

  for (int j = 0; j < opts.max_inner; ++j) {
    out.inner_iterations = j + 1;
    const Vec Hd = hess(dir);
    const double d_Hd = inner_fn(dir, Hd);
    const double alpha = r_r / d_Hd;
    const double e_Pe_new = e_Pe + 2.0 * alpha * e_Pd + alpha * alpha * d_Pd;

    if (d_Hd <= 0.0 || e_Pe_new >= delta_sq || !std::isfinite(alpha)) {
      const double tau = (-e_Pd + std::sqrt(e_Pd * e_Pd + d_Pd * (delta_sq - e_Pe))) / d_Pd;
      out.step = out.step + dir * tau;
      out.hess_step = out.hess_step + Hd * tau;
      out.reason = d_Hd <= 0.0 ? TcgStop::NegativeCurvature : TcgStop::ExceededTrustRegion;
      return out;
    }

    e_Pe = e_Pe_new;
    out.step = out.step + dir * alpha;
    out.hess_step = out.hess_step + Hd * alpha;
    r = r + Hd * alpha;

    const double r_r_new = inner_fn(r, r);
    const double norm_r = std::sqrt(r_r_new);
    if (norm_r <= norm_r0 * std::min(std::pow(norm_r0, opts.theta), opts.kappa)) {
      out.reason = TcgStop::ReachedTarget;
      return out;
    }

    const double beta = r_r_new / r_r;
    r_r = r_r_new;
    dir = r * -1.0 + dir * beta;
    e_Pd = beta * (e_Pd + alpha * d_Pd);
    d_Pd = r_r + beta * beta * d_Pd;
  }
  return out;
}

/// Real dimension of U(n) x U(n) (2n^2) or O(n) x O(n) (n(n-1)).
template <typename Scalar>
Index manifold_dimension(Index n) {
  return is_complex_v<Scalar> ? 2 * n * n : n * (n - 1);
}

template <typename Scalar>
void validate(const SolveOptions<Scalar> &o, Index n) {
  if (o.max_iter < 0) throw ValidationError("max_iter must be nonnegative");
  if (!(o.max_time > 0.0)) throw ValidationError("max_time must be positive");
  if (o.grad_tol && !(*o.grad_tol > 0.0)) throw ValidationError("grad_tol must be positive");
  if (!(o.rho_prime >= 0.0 && o.rho_prime < 0.25)) throw ValidationError("rho_prime must lie in [0, 1/4)");
  if (o.tcg_max_inner < 0) throw ValidationError("tcg_max_inner must be nonnegative");
  if (o.delta_bar && !(*o.delta_bar > 0.0)) throw ValidationError("delta_bar must be positive");
  if (o.delta0 && !(*o.delta0 > 0.0)) throw ValidationError("delta0 must be positive");
  if (o.delta0 && o.delta_bar && *o.delta0 > *o.delta_bar) throw ValidationError("delta0 must not exceed delta_bar");
  if (o.init == InitKind::Provided) {
    if (!o.provided) throw ValidationError("init=provided requires a starting point");
    if (o.provided->size() != n || !is_on_manifold(*o.provided))
      throw ValidationError("provided starting point is not a valid unitary pair of matching size");
  }
}

template <typename Scalar>
GroupPair<Scalar> initial_point(const SolveOptions<Scalar> &opts, Index n) {
  switch (opts.init) {
  case InitKind::Identity: return GroupPair<Scalar>::Identity(n);
  case InitKind::Provided: return *opts.provided;
  case InitKind::Random: break;
  }
  std::mt19937_64 rng(opts.seed);
  return random_point<Scalar>(n, rng);
}

/// Riemannian trust-region minimization of f(Q, Z) over U(n) x U(n) (O(n) x O(n) for real Scalar).
template <typename Scalar>
SolveReport<Scalar> solve(StabilityRegion region, const Pencil<Scalar> &P, const SolveOptions<Scalar> &opts) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const Index n = P.size();
  if (n < 1) throw ValidationError("solve: empty pencil");
  validate(opts, n);

  const double delta_bar = opts.delta_bar.value_or(std::sqrt(2.0 * static_cast<double>(n)));
  const double grad_tol = opts.grad_tol.value_or(1e-8 * std::max(1.0, std::sqrt(norm_sq(P))));
  double delta = opts.delta0.value_or(delta_bar / 8.0);
  if (delta > delta_bar) throw ValidationError("delta0 must not exceed delta_bar");

  TcgOptions tcg;
  tcg.max_inner = opts.tcg_max_inner > 0 ? opts.tcg_max_inner
                                         : static_cast<int>(std::max<Index>(1, manifold_dimension<Scalar>(n)));
  tcg.kappa = opts.tcg_kappa;
  tcg.theta = opts.tcg_theta;

  PencilObjective<Scalar> objective(region, P);
  SolveReport<Scalar> report;
  GroupPair<Scalar> x = initial_point(opts, n);
  double fx = objective.value(x);
  TangentPair<Scalar> grad = objective.rgrad(x);
  double grad_norm = norm(grad);
  report.trace.push_back({0, fx, grad_norm, delta, true});
  if (opts.observer) opts.observer(x);

  const auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
  const auto inner_fn = [](const TangentPair<Scalar> &a, const TangentPair<Scalar> &b) { return inner(a, b); };

  int iter = 0;
  for (;;) {
    if (grad_norm <= grad_tol) {
      report.stop_reason = StopReason::GradTol;
      break;
    }
    if (iter >= opts.max_iter) {
      report.stop_reason = StopReason::MaxIter;
      break;
    }
    if (elapsed() >= opts.max_time) {
      report.stop_reason = StopReason::MaxTime;
      break;
    }
    ++iter;

    auto hess = [&](const TangentPair<Scalar> &v) { return objective.rhess(x, v); };
    TcgResult<TangentPair<Scalar>> sub = tcg_subproblem(grad, hess, delta, tcg, inner_fn);

    GroupPair<Scalar> candidate;
    double f_candidate = std::numeric_limits<double>::infinity();
    try {
      candidate = retract(x, sub.step);
      f_candidate = objective.value(candidate);
    } catch (const ValidationError &) {
      // rank-deficient retraction: treated as a rejected step, the radius shrinks below.
    }

    const double reg = 1e-15 * std::max(1.0, std::abs(fx));
    const double rho_num = fx - f_candidate;
    const double rho_den = -inner(grad, sub.step) - 0.5 * inner(sub.step, sub.hess_step);
    const double rho = (rho_num + reg) / (rho_den + reg);
    const bool model_decreased = rho_den + reg > 0.0;
    const bool boundary_step =
        sub.reason == TcgStop::NegativeCurvature || sub.reason == TcgStop::ExceededTrustRegion;

    if (!std::isfinite(rho) || rho < 0.25 || !model_decreased) {
      delta /= 4.0;
    } else if (rho > 0.75 && boundary_step) {
      delta = std::min(2.0 * delta, delta_bar);
    }

    const bool accept = model_decreased && std::isfinite(rho) && rho > opts.rho_prime && f_candidate <= fx;
    if (accept) {
      x = std::move(candidate);
      fx = f_candidate;
      grad = objective.rgrad(x);
      grad_norm = norm(grad);
      if (opts.observer) opts.observer(x);
    }
    report.trace.push_back({iter, fx, grad_norm, delta, accept});
  }

  report.minimizer = x;
  report.objective_value = fx;
  report.grad_norm = grad_norm;
  report.iterations = iter;
  report.wall_time = elapsed();
  return report;
}

/// Seed of the k-th extra start in a multistart session.
inline std::uint64_t restart_seed(std::uint64_t seed, int k) {
  return k == 0 ? seed : seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(k);
}

/// One time-budgeted session. With random initialization and a finite max_time, fresh
/// random starts are drawn until the budget is spent and the best run is returned; the
/// first start uses `opts.seed`, so a budget that only fits one run reproduces `solve`.
/// Any other configuration is a single `solve` call.
template <typename Scalar>
SolveReport<Scalar> solve_multistart(StabilityRegion region, const Pencil<Scalar> &P,
                                     const SolveOptions<Scalar> &opts) {
  if (opts.init != InitKind::Random || !std::isfinite(opts.max_time)) return solve(region, P, opts);
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  SolveReport<Scalar> best;
  int k = 0;
  do {
    SolveOptions<Scalar> o = opts;
    o.seed = restart_seed(opts.seed, k);
    o.max_time = std::max(opts.max_time - elapsed(), 1e-3);
    SolveReport<Scalar> r = solve(region, P, o);
    if (k == 0 || r.objective_value < best.objective_value) best = std::move(r);
    ++k;
  } while (elapsed() < opts.max_time);
  best.starts = k;
  best.wall_time = elapsed();
  return best;
}

/// Worst relative error between <egrad, E> and a central difference of the ambient objective
/// over `num_dirs` random ambient directions. Pairs whose magnitudes both fall below
/// `abs_floor` count as agreeing.
template <typename Scalar, typename Rng>
double gradient_check(StabilityRegion region, const Pencil<Scalar> &P, const GroupPair<Scalar> &G, int num_dirs,
                      Rng &rng, double h = 1e-6, double abs_floor = 1e-9) {
  const Index n = P.size();
  const auto ev = evaluate(region, P, G);
  const TangentPair<Scalar> g = euclidean_gradient(P, G, ev);
  const double floor = abs_floor * std::max(1.0, norm_sq(P));
  double worst = 0.0;
  for (int k = 0; k < num_dirs; ++k) {
    const TangentPair<Scalar> E{gaussian_matrix<Scalar>(n, n, rng), gaussian_matrix<Scalar>(n, n, rng)};
    const GroupPair<Scalar> plus{G.Q + h * E.XQ, G.Z + h * E.XZ};
    const GroupPair<Scalar> minus{G.Q - h * E.XQ, G.Z - h * E.XZ};
    const double fd = (evaluate_ambient(region, P, plus).value - evaluate_ambient(region, P, minus).value) / (2.0 * h);
    const double an = inner(g, E);
    const double scale = std::max(std::abs(fd), std::abs(an));
    if (scale <= floor) continue;
    worst = std::max(worst, std::abs(fd - an) / scale);
  }
  return worst;
}

/// Worst relative error between the Euclidean Hessian-vector product and a central difference
/// of the Euclidean gradient.
template <typename Scalar, typename Rng>
double hessian_check(StabilityRegion region, const Pencil<Scalar> &P, const GroupPair<Scalar> &G, int num_dirs,
                     Rng &rng, double h = 1e-5, double abs_floor = 1e-9) {
  const Index n = P.size();
  const auto ev = evaluate(region, P, G);
  const double floor = abs_floor * std::max(1.0, norm_sq(P));
  double worst = 0.0;
  for (int k = 0; k < num_dirs; ++k) {
    const TangentPair<Scalar> D{gaussian_matrix<Scalar>(n, n, rng), gaussian_matrix<Scalar>(n, n, rng)};
    const GroupPair<Scalar> plus{G.Q + h * D.XQ, G.Z + h * D.XZ};
    const GroupPair<Scalar> minus{G.Q - h * D.XQ, G.Z - h * D.XZ};
    const TangentPair<Scalar> gp = euclidean_gradient(P, plus, evaluate_ambient(region, P, plus));
    const TangentPair<Scalar> gm = euclidean_gradient(P, minus, evaluate_ambient(region, P, minus));
    const TangentPair<Scalar> fd = (gp - gm) * (1.0 / (2.0 * h));
    const TangentPair<Scalar> an = euclidean_hessian_vec(region, P, G, ev, D);
    const double scale = std::max(norm(fd), norm(an));
    if (scale <= floor) continue;
    worst = std::max(worst, norm(fd - an) / scale);
  }
  return worst;
}

} // namespace stabpencil
