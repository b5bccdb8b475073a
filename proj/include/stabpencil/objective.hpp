#pragma once

#include "stabpencil/manifold.hpp"
#include "stabpencil/pencil.hpp"
#include "stabpencil/projection.hpp"

#include <vector>

namespace stabpencil {

/// Nearest pencil to the input among the closure of the stable upper triangular pencils:
/// strictly upper part kept, diagonal entries projected, strictly lower part zeroed.
template <typename Scalar>
struct TriangularTarget {
  Matrix<Scalar> T0; // trailing coefficient
  Matrix<Scalar> T1; // leading coefficient
  std::vector<ProjectionResult> diag_results;

  Pencil<Scalar> pencil() const { return {T0, T1}; }
};

template <typename Scalar>
struct ObjectiveEvaluation {
  double value = 0.0;
  Pencil<Scalar> rotated;
  TriangularTarget<Scalar> target;
  Pencil<Scalar> residual;
};

template <typename Scalar>
TriangularTarget<Scalar> triangular_target(StabilityRegion region, const Pencil<Scalar> &P) {
  const Index n = P.size();
  TriangularTarget<Scalar> T{upper_part<Scalar>(P.A), upper_part<Scalar>(P.B), {}};
  T.diag_results.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    ProjectionResult r = project(region, diagonal_entry(P, i));
    T.T0(i, i) = from_complex<Scalar>(r.projected.a);
    T.T1(i, i) = from_complex<Scalar>(r.projected.b);
    T.diag_results.push_back(std::move(r));
  }
  return T;
}

/// Objective at an arbitrary (not necessarily unitary) pair; the ambient extension of f.
template <typename Scalar>
ObjectiveEvaluation<Scalar> evaluate_ambient(StabilityRegion region, const Pencil<Scalar> &P,
                                             const GroupPair<Scalar> &G) {
  ObjectiveEvaluation<Scalar> ev;
  ev.rotated = Pencil<Scalar>{G.Q * P.A * G.Z, G.Q * P.B * G.Z};
  ev.target = triangular_target(region, ev.rotated);
  ev.residual = ev.rotated - ev.target.pencil();
  ev.value = norm_sq(ev.residual);
  return ev;
}

/// f(Q, Z) = ||QAZ + xQBZ - T(QAZ + xQBZ)||_F^2.
template <typename Scalar>
ObjectiveEvaluation<Scalar> evaluate(StabilityRegion region, const Pencil<Scalar> &P, const GroupPair<Scalar> &G) {
  if (G.size() != P.size()) throw ValidationError("evaluate: transform size does not match pencil");
  if (!is_on_manifold(G)) throw ValidationError("evaluate: transforms are not unitary");
  return evaluate_ambient(region, P, G);
}

/// Euclidean gradient from an evaluation already done at G.
template <typename Scalar>
TangentPair<Scalar> euclidean_gradient(const Pencil<Scalar> &P, const GroupPair<Scalar> &G,
                                       const ObjectiveEvaluation<Scalar> &ev) {
  const Matrix<Scalar> &RA = ev.residual.A;
  const Matrix<Scalar> &RB = ev.residual.B;
  const Matrix<Scalar> AZ = P.A * G.Z;
  const Matrix<Scalar> BZ = P.B * G.Z;
  const Matrix<Scalar> QA = G.Q * P.A;
  const Matrix<Scalar> QB = G.Q * P.B;
  return {2.0 * (RA * AZ.adjoint() + RB * BZ.adjoint()), 2.0 * (QA.adjoint() * RA + QB.adjoint() * RB)};
}

template <typename Scalar>
TangentPair<Scalar> euclidean_gradient(StabilityRegion region, const Pencil<Scalar> &P, const GroupPair<Scalar> &G) {
  return euclidean_gradient(P, G, evaluate(region, P, G));
}

enum class MedialPolicy {
  Throw,   // propagate NonDifferentiableError
  OneSided // use the stable-side (identity) derivative for the offending entry
};

/// Directional derivative of the Euclidean gradient along D = (dQ, dZ).
template <typename Scalar>
TangentPair<Scalar> euclidean_hessian_vec(StabilityRegion region, const Pencil<Scalar> &P, const GroupPair<Scalar> &G,
                                          const ObjectiveEvaluation<Scalar> &ev, const TangentPair<Scalar> &D,
                                          MedialPolicy policy = MedialPolicy::Throw) {
  const Index n = P.size();
  const Matrix<Scalar> AZ = P.A * G.Z;
  const Matrix<Scalar> BZ = P.B * G.Z;
  const Matrix<Scalar> QA = G.Q * P.A;
  const Matrix<Scalar> QB = G.Q * P.B;
  const Matrix<Scalar> AdZ = P.A * D.XZ;
  const Matrix<Scalar> BdZ = P.B * D.XZ;

  // Derivative of the rotated pencil.
  const Matrix<Scalar> dRotA = D.XQ * AZ + QA * D.XZ;
  const Matrix<Scalar> dRotB = D.XQ * BZ + QB * D.XZ;

  // Derivative of the residual: L(dRot) - H with H diagonal.
  Matrix<Scalar> dRA = lower_part<Scalar>(dRotA);
  Matrix<Scalar> dRB = lower_part<Scalar>(dRotB);
  for (Index i = 0; i < n; ++i) {
    const ScalarPencil s = diagonal_entry(ev.rotated, i);
    const ScalarPencil ds{Complex(dRotA(i, i)), Complex(dRotB(i, i))};
    ScalarPencil dh;
    try {
      dh = dproject(region, s, ds);
    } catch (const NonDifferentiableError &) {
      if (policy == MedialPolicy::Throw) throw;
      dh = ds;
    }
    dRA(i, i) -= from_complex<Scalar>(dh.a);
    dRB(i, i) -= from_complex<Scalar>(dh.b);
  }

  const Matrix<Scalar> &RA = ev.residual.A;
  const Matrix<Scalar> &RB = ev.residual.B;
  TangentPair<Scalar> H;
  H.XQ = 2.0 * (RA * AdZ.adjoint() + dRA * AZ.adjoint() + RB * BdZ.adjoint() + dRB * BZ.adjoint());
  H.XZ = 2.0 * ((D.XQ * P.A).adjoint() * RA + QA.adjoint() * dRA + (D.XQ * P.B).adjoint() * RB + QB.adjoint() * dRB);
  return H;
}

template <typename Scalar>
TangentPair<Scalar> euclidean_hessian_vec(StabilityRegion region, const Pencil<Scalar> &P, const GroupPair<Scalar> &G,
                                          const TangentPair<Scalar> &D, MedialPolicy policy = MedialPolicy::Throw) {
  return euclidean_hessian_vec(region, P, G, evaluate(region, P, G), D, policy);
}

/// Objective bound to one pencil, with a single-point cache so that value, gradient and
/// Hessian requests at the same (Q, Z) share one evaluation. Not thread-safe; each
/// optimizer owns its instance.
template <typename Scalar>
class PencilObjective {
public:
  PencilObjective(StabilityRegion region, Pencil<Scalar> P) : region_(region), P_(std::move(P)) {}

  StabilityRegion region() const { return region_; }
  const Pencil<Scalar> &pencil() const { return P_; }

  const ObjectiveEvaluation<Scalar> &at(const GroupPair<Scalar> &G) {
    if (!cached_ || G.Q != point_.Q || G.Z != point_.Z) {
      evaluation_ = evaluate(region_, P_, G);
      point_ = G;
      egrad_.reset();
      cached_ = true;
      ++evaluations_;
    }
    return evaluation_;
  }

  double value(const GroupPair<Scalar> &G) { return at(G).value; }

  const TangentPair<Scalar> &egrad(const GroupPair<Scalar> &G) {
    const auto &ev = at(G);
    if (!egrad_) egrad_ = euclidean_gradient(P_, G, ev);
    return *egrad_;
  }

  TangentPair<Scalar> rgrad(const GroupPair<Scalar> &G) { return egrad_to_rgrad(G, egrad(G)); }

  /// Riemannian Hessian along a tangent vector; medial-axis entries fall back to the one-sided branch.
  TangentPair<Scalar> rhess(const GroupPair<Scalar> &G, const TangentPair<Scalar> &X) {
    const auto &ev = at(G);
    const TangentPair<Scalar> &g = egrad(G);
    const TangentPair<Scalar> eh = euclidean_hessian_vec(region_, P_, G, ev, X, MedialPolicy::OneSided);
    return ehess_to_rhess(G, g, eh, X);
  }

  std::size_t evaluations() const { return evaluations_; }

private:
  StabilityRegion region_;
  Pencil<Scalar> P_;
  bool cached_ = false;
  GroupPair<Scalar> point_;
  ObjectiveEvaluation<Scalar> evaluation_;
  std::optional<TangentPair<Scalar>> egrad_;
  std::size_t evaluations_ = 0;
};

} // namespace stabpencil
