#pragma once

#include "stabpencil/manifold.hpp"
#include "stabpencil/pencil.hpp"

#include <random>

namespace stabpencil {

/// x I - M with M the grcar matrix: ones on the diagonal and three superdiagonals,
/// -1 on the first subdiagonal.
template <typename Scalar>
Pencil<Scalar> gen_grcar(Index n) {
  if (n < 1) throw ValidationError("gen_grcar: n must be positive");
  Matrix<Scalar> M = Matrix<Scalar>::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k <= 3 && i + k < n; ++k) M(i, i + k) = Scalar(1.0);
    if (i > 0) M(i, i - 1) = Scalar(-1.0);
  }
  return {-M, Matrix<Scalar>::Identity(n, n)};
}

/// Stiffness-type tridiagonal matrix of an n-mass chain with coefficients w:
/// diagonal w_i + w_{i+1} (w_{n+1} = 0), off-diagonals -w_{i+1}.
inline Eigen::MatrixXd chain_matrix(const Eigen::VectorXd &w) {
  const Index n = w.size();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    K(i, i) = w(i) + (i + 1 < n ? w(i + 1) : 0.0);
    if (i + 1 < n) {
      K(i, i + 1) = -w(i + 1);
      K(i + 1, i) = -w(i + 1);
    }
  }
  return K;
}

/// Damped mass-spring chain with m = c = k = [1..n], as the 2n x 2n pencil
///   B = diag(M, I),  A = -(J - R) Q,  J = [0 -I; I 0],  R = diag(C, -eps I),  Q = diag(I, K).
template <typename Scalar>
Pencil<Scalar> gen_oscillator(Index n, double eps) {
  if (n < 1) throw ValidationError("gen_oscillator: n must be positive");
  const Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(n, 1.0, static_cast<double>(n));
  const Eigen::MatrixXd Mm = w.asDiagonal();
  const Eigen::MatrixXd C = chain_matrix(w);
  const Eigen::MatrixXd K = chain_matrix(w);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Index m = 2 * n;

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
  B.topLeftCorner(n, n) = Mm;
  B.bottomRightCorner(n, n) = I;

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  J.topRightCorner(n, n) = -I;
  J.bottomLeftCorner(n, n) = I;
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(m, m);
  R.topLeftCorner(n, n) = C;
  R.bottomRightCorner(n, n) = -eps * I;
  Eigen::MatrixXd Qm = Eigen::MatrixXd::Zero(m, m);
  Qm.topLeftCorner(n, n) = I;
  Qm.bottomRightCorner(n, n) = K;

  const Eigen::MatrixXd A = -(J - R) * Qm;
  return {A.cast<Scalar>(), B.cast<Scalar>()};
}

/// Gaussian pencil scaled by 1/(sqrt(2) n).
template <typename Scalar, typename Rng>
Pencil<Scalar> gen_gaussian(Index n, Rng &rng) {
  if (n < 1) throw ValidationError("gen_gaussian: n must be positive");
  const double scale = 1.0 / (std::sqrt(2.0) * static_cast<double>(n));
  Matrix<Scalar> A = gaussian_matrix<Scalar>(n, n, rng) * scale;
  Matrix<Scalar> B = gaussian_matrix<Scalar>(n, n, rng) * scale;
  return {std::move(A), std::move(B)};
}

/// Replaces B by its best rank-r approximation.
template <typename Scalar>
Pencil<Scalar> truncate_rank(const Pencil<Scalar> &P, Index r) {
  const Index n = P.size();
  if (r < 0 || r > n) throw ValidationError("truncate_rank: rank out of range");
  if (r == n) return P;
  Eigen::JacobiSVD<Matrix<Scalar>> svd(P.B, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix<Scalar> Br = svd.matrixU().leftCols(r) * svd.singularValues().head(r).template cast<Scalar>().asDiagonal() *
                      svd.matrixV().leftCols(r).adjoint();
  return {P.A, std::move(Br)};
}

} // namespace stabpencil
