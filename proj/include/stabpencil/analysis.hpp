#pragma once

#include "stabpencil/manifold.hpp"
#include "stabpencil/objective.hpp"
#include "stabpencil/pencil.hpp"
#include "stabpencil/projection.hpp"

#include <numeric>
#include <string>
#include <vector>

namespace stabpencil {

template <typename Scalar>
struct MinimizerResult {
  Pencil<Scalar> pencil;     // S + xT in the input basis
  Pencil<Scalar> triangular; // T(QAZ + xQBZ)
  GroupPair<Scalar> transforms;
  double squared_distance = 0.0;
  std::vector<GeneralizedEigenvalue> eigenvalues;
  bool is_singular = false;
};

/// Relative tolerance used to read eigenvalues off the triangular form.
inline constexpr double kEigenvalueTol = 1e-12;

template <typename Scalar>
MinimizerResult<Scalar> recover_minimizer(StabilityRegion region, const Pencil<Scalar> &P,
                                          const GroupPair<Scalar> &G) {
  const ObjectiveEvaluation<Scalar> ev = evaluate(region, P, G);
  MinimizerResult<Scalar> r;
  r.triangular = ev.target.pencil();
  r.pencil = Pencil<Scalar>{G.Q.adjoint() * r.triangular.A * G.Z.adjoint(), G.Q.adjoint() * r.triangular.B * G.Z.adjoint()};
  r.transforms = G;
  r.squared_distance = ev.value;
  r.eigenvalues = triangular_eigenvalues(r.triangular, kEigenvalueTol);
  r.is_singular = std::any_of(r.eigenvalues.begin(), r.eigenvalues.end(),
                              [](const GeneralizedEigenvalue &e) { return e.kind == EigenKind::Indeterminate; });
  return r;
}

enum class StabilityVerdict { Stable, SingularClosurePoint, Violation };

inline std::string to_string(StabilityVerdict v) {
  switch (v) {
  case StabilityVerdict::Stable: return "stable";
  case StabilityVerdict::SingularClosurePoint: return "singular_closure_point";
  case StabilityVerdict::Violation: return "violation";
  }
  return "unknown";
}

/// Rounding allowance added to the membership tolerance; projected entries sit on the
/// region boundary only up to a few ulps.
inline constexpr double kMembershipSlack = 64.0 * std::numeric_limits<double>::epsilon();

/// Checks every diagonal entry of an upper triangular pencil against the region.
/// Entries are normalized to unit norm first so `tol` is scale-free.
template <typename Scalar>
StabilityVerdict verify_stability(StabilityRegion region, const Pencil<Scalar> &triangular, double tol,
                                  double singular_tol = kEigenvalueTol) {
  const auto eigs = triangular_eigenvalues(triangular, singular_tol);
  bool singular = false;
  for (Index i = 0; i < triangular.size(); ++i) {
    if (eigs[static_cast<std::size_t>(i)].kind == EigenKind::Indeterminate) {
      singular = true;
      continue;
    }
    const ScalarPencil d = diagonal_entry(triangular, i);
    const ScalarPencil unit = d * (1.0 / d.norm());
    if (!is_stable_scalar(region, unit, tol + kMembershipSlack)) return StabilityVerdict::Violation;
  }
  return singular ? StabilityVerdict::SingularClosurePoint : StabilityVerdict::Stable;
}

template <typename Scalar>
StabilityVerdict verify_stability(StabilityRegion region, const MinimizerResult<Scalar> &result, double tol) {
  return verify_stability(region, result.triangular, tol);
}

/// Chordal distance between two points of the Riemann sphere in homogeneous form.
inline double chordal_distance(const Complex &a, const Complex &b, const Complex &c, const Complex &d) {
  const double na = std::sqrt(std::norm(a) + std::norm(b));
  const double nc = std::sqrt(std::norm(c) + std::norm(d));
  return std::abs(a * d - b * c) / (na * nc);
}

struct EigenCluster {
  GeneralizedEigenvalue eigenvalue; // representative
  int algebraic_multiplicity = 0;
  int geometric_multiplicity = 0;
};

struct JordanReport {
  std::vector<EigenCluster> clusters;
  bool has_nontrivial_chain = false;
  double tol = 0.0;
  int indeterminate_count = 0;
};

inline constexpr double kClusterTol = 1e-8;

/// Clusters the diagonal roots of the triangular form (single linkage in the chordal metric)
/// and compares each cluster size with n - rank(b A - a B) at the representative (a, b).
/// A cluster always counts at least one eigenvector.
template <typename Scalar>
JordanReport jordan_structure(const MinimizerResult<Scalar> &result, double tol = kEigenvalueTol,
                              double cluster_tol = kClusterTol) {
  JordanReport rep;
  rep.tol = tol;
  const Pencil<Scalar> &T = result.triangular;
  const Index n = T.size();
  const auto eigs = triangular_eigenvalues(T, tol);

  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    if (eigs[i].kind == EigenKind::Indeterminate)
      ++rep.indeterminate_count;
    else
      members.push_back(i);
  }

  // Union-find over the non-indeterminate roots.
  std::vector<std::size_t> parent(eigs.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t p = 0; p < members.size(); ++p)
    for (std::size_t q = p + 1; q < members.size(); ++q) {
      const auto &e = eigs[members[p]];
      const auto &f = eigs[members[q]];
      if (chordal_distance(e.a, e.b, f.a, f.b) <= cluster_tol) parent[find(members[p])] = find(members[q]);
    }

  const double abs_tol = tol * std::sqrt(norm_sq(T));
  std::vector<bool> done(eigs.size(), false);
  for (std::size_t p : members) {
    const std::size_t root = find(p);
    if (done[root]) continue;
    done[root] = true;

    // Representative: phase-aligned mean of the unit-normalized homogeneous pairs.
    Complex sa{0.0}, sb{0.0};
    int count = 0;
    Complex ref_a{0.0}, ref_b{0.0};
    for (std::size_t q : members) {
      if (find(q) != root) continue;
      const auto &e = eigs[q];
      const double nrm = std::sqrt(std::norm(e.a) + std::norm(e.b));
      Complex ua = e.a / nrm, ub = e.b / nrm;
      if (count == 0) {
        ref_a = ua;
        ref_b = ub;
      } else {
        const Complex overlap = std::conj(ref_a) * ua + std::conj(ref_b) * ub;
        if (std::abs(overlap) > 0.0) {
          const Complex phase = std::conj(overlap) / std::abs(overlap);
          ua *= phase;
          ub *= phase;
        }
      }
      sa += ua;
      sb += ub;
      ++count;
    }
    const double nrm = std::sqrt(std::norm(sa) + std::norm(sb));
    sa /= nrm;
    sb /= nrm;

    EigenCluster c;
    c.eigenvalue = classify_root(sa, sb, 0.0);
    if (c.eigenvalue.kind == EigenKind::Finite && std::abs(sb) <= cluster_tol) {
      c.eigenvalue.b = Complex(0.0);
      c.eigenvalue.kind = EigenKind::Infinite;
    }
    c.algebraic_multiplicity = count;

    Matrix<Complex> M(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i)
        M(i, j) = c.eigenvalue.b * Complex(T.A(i, j)) - c.eigenvalue.a * Complex(T.B(i, j));
    const int kernel = static_cast<int>(n - numerical_rank(M, abs_tol));
    c.geometric_multiplicity = std::max(1, std::min(kernel, count));
    if (c.algebraic_multiplicity > c.geometric_multiplicity) rep.has_nontrivial_chain = true;
    rep.clusters.push_back(c);
  }
  return rep;
}

/// Default perturbation size for regularize_singular, relative to ||P||_F.
inline constexpr double kDefaultRegularization = 1e-10;

/// Triangular form with every indeterminate diagonal entry 0 + x0 replaced by 0 + x delta.
template <typename Scalar>
Pencil<Scalar> regularized_triangular(const MinimizerResult<Scalar> &result, double delta) {
  if (!result.is_singular) throw ValidationError("regularize_singular: result is not singular");
  if (!(delta > 0.0)) throw ValidationError("regularize_singular: delta must be positive");
  Pencil<Scalar> T = result.triangular;
  for (std::size_t i = 0; i < result.eigenvalues.size(); ++i) {
    if (result.eigenvalues[i].kind != EigenKind::Indeterminate) continue;
    const Index k = static_cast<Index>(i);
    T.A(k, k) = Scalar(0.0);
    T.B(k, k) = Scalar(delta);
  }
  return T;
}

/// Regular stable pencil near a singular minimizer: each zero diagonal entry gets the
/// eigenvalue 0, which belongs to both regions, then the result is rotated back.
template <typename Scalar>
Pencil<Scalar> regularize_singular(StabilityRegion /*region*/, const MinimizerResult<Scalar> &result, double delta) {
  const Pencil<Scalar> T = regularized_triangular(result, delta);
  const GroupPair<Scalar> &G = result.transforms;
  return {G.Q.adjoint() * T.A * G.Z.adjoint(), G.Q.adjoint() * T.B * G.Z.adjoint()};
}

} // namespace stabpencil
