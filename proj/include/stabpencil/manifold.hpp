#pragma once

#include "stabpencil/pencil.hpp"

#include <random>

namespace stabpencil {

/// A point of U(n) x U(n) (or O(n) x O(n) when Scalar is real).
template <typename Scalar>
struct GroupPair {
  Matrix<Scalar> Q;
  Matrix<Scalar> Z;

  static GroupPair Identity(Index n) { return {Matrix<Scalar>::Identity(n, n), Matrix<Scalar>::Identity(n, n)}; }
  Index size() const { return Q.rows(); }
};

/// A pair of ambient n x n matrices. Used both for tangent vectors and for raw
/// Euclidean gradients/directions; the latter are not constrained.
template <typename Scalar>
struct TangentPair {
  Matrix<Scalar> XQ;
  Matrix<Scalar> XZ;

  static TangentPair Zero(Index n) { return {Matrix<Scalar>::Zero(n, n), Matrix<Scalar>::Zero(n, n)}; }

  TangentPair operator+(const TangentPair &o) const { return {XQ + o.XQ, XZ + o.XZ}; }
  TangentPair operator-(const TangentPair &o) const { return {XQ - o.XQ, XZ - o.XZ}; }
  TangentPair operator-() const { return {-XQ, -XZ}; }
  TangentPair operator*(double s) const { return {XQ * s, XZ * s}; }
  TangentPair &operator+=(const TangentPair &o) {
    XQ += o.XQ;
    XZ += o.XZ;
    return *this;
  }
};

template <typename Scalar>
TangentPair<Scalar> operator*(double s, const TangentPair<Scalar> &t) {
  return t * s;
}

/// Real inner product Re tr(X^* Y) on C^{n x n}.
template <typename Scalar>
double real_inner(const Matrix<Scalar> &X, const Matrix<Scalar> &Y) {
  return std::real((X.array().conjugate() * Y.array()).sum());
}

/// Metric of the product manifold: sum of the per-factor real trace inner products.
template <typename Scalar>
double inner(const TangentPair<Scalar> &X, const TangentPair<Scalar> &Y) {
  return real_inner(X.XQ, Y.XQ) + real_inner(X.XZ, Y.XZ);
}

template <typename Scalar>
double norm(const TangentPair<Scalar> &X) {
  return std::sqrt(inner(X, X));
}

template <typename Scalar>
Matrix<Scalar> skew_part(const Matrix<Scalar> &M) {
  return 0.5 * (M - M.adjoint());
}

template <typename Scalar>
Matrix<Scalar> herm_part(const Matrix<Scalar> &M) {
  return 0.5 * (M + M.adjoint());
}

template <typename Scalar>
double unitarity_defect(const Matrix<Scalar> &Q) {
  return (Q.adjoint() * Q - Matrix<Scalar>::Identity(Q.cols(), Q.cols())).norm();
}

/// Largest ||Q^*Q - I||_F of the two factors.
template <typename Scalar>
double unitarity_defect(const GroupPair<Scalar> &G) {
  return std::max(unitarity_defect(G.Q), unitarity_defect(G.Z));
}

/// Drift tolerance for the group constraint, 1e-10 * sqrt(n).
template <typename Scalar>
bool is_on_manifold(const GroupPair<Scalar> &G, double tol = 1e-10) {
  const double scaled = tol * std::sqrt(static_cast<double>(std::max<Index>(1, G.size())));
  return G.Q.rows() == G.Q.cols() && G.Z.rows() == G.Z.cols() && G.Q.rows() == G.Z.rows() &&
         unitarity_defect(G) <= scaled;
}

template <typename Scalar>
TangentPair<Scalar> tangent_project(const GroupPair<Scalar> &base, const TangentPair<Scalar> &E) {
  return {base.Q * skew_part<Scalar>(base.Q.adjoint() * E.XQ), base.Z * skew_part<Scalar>(base.Z.adjoint() * E.XZ)};
}

/// Q-factor of M with the positive-real-diagonal convention on R.
template <typename Scalar>
Matrix<Scalar> qr_unitary_factor(const Matrix<Scalar> &M) {
  const Index n = M.rows();
  Eigen::HouseholderQR<Matrix<Scalar>> qr(M);
  Matrix<Scalar> Qf = qr.householderQ() * Matrix<Scalar>::Identity(n, n);
  const Matrix<Scalar> &R = qr.matrixQR();
  const double scale = std::max(1.0, M.norm());
  for (Index j = 0; j < n; ++j) {
    const Scalar r = R(j, j);
    const double mag = std::abs(r);
    if (mag <= 1e-14 * scale) throw ValidationError("qr retraction: rank-deficient argument");
    Qf.col(j) *= r / mag;
  }
  return Qf;
}

/// QR retraction: qf(Q + t XQ), qf(Z + t XZ).
template <typename Scalar>
GroupPair<Scalar> retract(const GroupPair<Scalar> &base, const TangentPair<Scalar> &X, double t = 1.0) {
  return {qr_unitary_factor<Scalar>(base.Q + t * X.XQ), qr_unitary_factor<Scalar>(base.Z + t * X.XZ)};
}

/// Riemannian gradient: projection of the Euclidean gradient onto the tangent space.
template <typename Scalar>
TangentPair<Scalar> egrad_to_rgrad(const GroupPair<Scalar> &base, const TangentPair<Scalar> &egrad) {
  return tangent_project(base, egrad);
}

/// Riemannian Hessian-vector product from its Euclidean counterpart.
/// The Weingarten term for the unitary group is X * herm(Q^* egrad).
template <typename Scalar>
TangentPair<Scalar> ehess_to_rhess(const GroupPair<Scalar> &base, const TangentPair<Scalar> &egrad,
                                   const TangentPair<Scalar> &ehessvec, const TangentPair<Scalar> &X) {
  const TangentPair<Scalar> corrected{
      ehessvec.XQ - X.XQ * herm_part<Scalar>(base.Q.adjoint() * egrad.XQ),
      ehessvec.XZ - X.XZ * herm_part<Scalar>(base.Z.adjoint() * egrad.XZ)};
  return tangent_project(base, corrected);
}

template <typename Scalar, typename Rng>
Matrix<Scalar> gaussian_matrix(Index rows, Index cols, Rng &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix<Scalar> M(rows, cols);
  // Column-major fill so the stream order is fixed.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      if constexpr (is_complex_v<Scalar>) {
        const double re = normal(rng);
        const double im = normal(rng);
        M(i, j) = Scalar(re, im);
      } else {
        M(i, j) = normal(rng);
      }
    }
  return M;
}

/// Haar-distributed point: QR factors of Gaussian matrices.
template <typename Scalar, typename Rng>
GroupPair<Scalar> random_point(Index n, Rng &rng) {
  Matrix<Scalar> Q = qr_unitary_factor<Scalar>(gaussian_matrix<Scalar>(n, n, rng));
  Matrix<Scalar> Z = qr_unitary_factor<Scalar>(gaussian_matrix<Scalar>(n, n, rng));
  return {std::move(Q), std::move(Z)};
}

/// Unit-norm tangent vector at `base`.
template <typename Scalar, typename Rng>
TangentPair<Scalar> random_tangent(const GroupPair<Scalar> &base, Rng &rng) {
  const Index n = base.size();
  TangentPair<Scalar> E{gaussian_matrix<Scalar>(n, n, rng), gaussian_matrix<Scalar>(n, n, rng)};
  TangentPair<Scalar> X = tangent_project(base, E);
  const double nx = norm(X);
  return nx > 0.0 ? X * (1.0 / nx) : X;
}

} // namespace stabpencil
