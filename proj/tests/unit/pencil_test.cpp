#include "stabpencil/pencil.hpp"

#include "test_util.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <algorithm>

using namespace stabpencil;
using stabpencil::test::random_pencil;

namespace {

// Entrywise sum of squared moduli, written out independently of Eigen's norms.
template <typename Scalar>
double entrywise_norm_sq(const Pencil<Scalar> &P) {
  double s = 0.0;
  for (Index i = 0; i < P.size(); ++i)
    for (Index j = 0; j < P.size(); ++j) {
      s += std::real(P.A(i, j) * std::conj(P.A(i, j)));
      s += std::real(P.B(i, j) * std::conj(P.B(i, j)));
    }
  return s;
}

// Roots of prod_i (a_i + x b_i) via the companion matrix of the expanded polynomial.
std::vector<Complex> determinant_roots(const std::vector<Complex> &a, const std::vector<Complex> &b) {
  std::vector<Complex> coeffs{Complex(1.0)}; // coeffs[k] multiplies x^k
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::vector<Complex> next(coeffs.size() + 1, Complex(0.0));
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      next[k] += coeffs[k] * a[i];
      next[k + 1] += coeffs[k] * b[i];
    }
    coeffs = next;
  }
  const Index deg = static_cast<Index>(coeffs.size()) - 1;
  Matrix<Complex> C = Matrix<Complex>::Zero(deg, deg);
  for (Index i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
  for (Index i = 0; i < deg; ++i) C(i, deg - 1) = -coeffs[static_cast<std::size_t>(i)] / coeffs.back();
  Eigen::ComplexEigenSolver<Matrix<Complex>> es(C);
  std::vector<Complex> roots(es.eigenvalues().data(), es.eigenvalues().data() + deg);
  return roots;
}

// Largest distance in a greedy one-to-one matching of two multisets.
double multiset_mismatch(std::vector<Complex> x, std::vector<Complex> y) {
  double worst = 0.0;
  for (const Complex &v : x) {
    auto it = std::min_element(y.begin(), y.end(), [&](const Complex &p, const Complex &q) {
      return std::abs(p - v) < std::abs(q - v);
    });
    worst = std::max(worst, std::abs(*it - v) / std::max(1.0, std::abs(v)));
    y.erase(it);
  }
  return worst;
}

} // namespace

TEST(PencilCore, NormSqSimpleCases) {
  EXPECT_EQ(norm_sq(Pencil<double>::Zero(2)), 0.0);
  const Pencil<double> I{Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)};
  EXPECT_EQ(norm_sq(I), 4.0);
}

TEST(PencilCore, NormSqMatchesEntrywiseSum) {
  std::mt19937_64 rng(7);
  const auto P = random_pencil<Complex>(3, rng);
  EXPECT_NEAR(norm_sq(P), entrywise_norm_sq(P), 1e-13 * entrywise_norm_sq(P));
  EXPECT_NEAR(norm_sq(P), std::pow(distance(P, Pencil<Complex>::Zero(3)), 2), 1e-13 * norm_sq(P));
}

TEST(PencilCore, Distance) {
  std::mt19937_64 rng(8);
  const auto P = random_pencil<Complex>(4, rng);
  const auto R = random_pencil<Complex>(4, rng);
  EXPECT_EQ(distance(P, P), 0.0);
  EXPECT_DOUBLE_EQ(distance(P, R), distance(R, P));
  EXPECT_NEAR(distance(P, R), std::sqrt(entrywise_norm_sq(P - R)), 1e-13);

  const Pencil<double> one{Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::MatrixXd::Zero(1, 1)};
  EXPECT_EQ(distance(one, Pencil<double>::Zero(1)), 1.0);

  EXPECT_THROW(distance(P, Pencil<Complex>::Zero(3)), ValidationError);
}

TEST(PencilCore, PencilRejectsMismatchedCoefficients) {
  EXPECT_THROW((Pencil<double>{Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(3, 3)}), ValidationError);
  EXPECT_THROW((Pencil<double>{Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Zero(2, 3)}), ValidationError);
}

TEST(PencilCore, TriangularEigenvaluesFiniteAndInfinite) {
  Eigen::MatrixXd A(2, 2), B(2, 2);
  A << 2, 5, 0, 1;
  B << 1, 3, 0, 0;
  const auto eigs = triangular_eigenvalues(Pencil<double>{A, B}, 1e-12);
  ASSERT_EQ(eigs.size(), 2u);
  EXPECT_EQ(eigs[0].kind, EigenKind::Finite);
  EXPECT_EQ(eigs[0].value(), Complex(-2.0));
  EXPECT_EQ(eigs[1].kind, EigenKind::Infinite);
}

TEST(PencilCore, TriangularEigenvaluesIndeterminate) {
  Eigen::MatrixXd A(2, 2), B(2, 2);
  A << 0, 1, 0, 1;
  B << 0, 1, 0, 1;
  const auto eigs = triangular_eigenvalues(Pencil<double>{A, B}, 1e-12);
  EXPECT_EQ(eigs[0].kind, EigenKind::Indeterminate);
  EXPECT_EQ(eigs[1].kind, EigenKind::Finite);
  EXPECT_EQ(eigs[1].value(), Complex(-1.0));
}

TEST(PencilCore, TriangularEigenvaluesRejectsNonTriangular) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
  A(1, 0) = 1e-3;
  EXPECT_THROW(triangular_eigenvalues(Pencil<double>{A, Eigen::MatrixXd::Identity(2, 2)}, 1e-12), ValidationError);
  // Below the relative threshold the entry is tolerated.
  A(1, 0) = 1e-14;
  EXPECT_NO_THROW(triangular_eigenvalues(Pencil<double>{A, Eigen::MatrixXd::Identity(2, 2)}, 1e-12));
}

TEST(PencilCore, TriangularEigenvaluesMatchDeterminantRoots) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto P = stabpencil::test::random_upper_pencil<Complex>(5, rng);
    std::vector<Complex> a, b, ours;
    for (Index i = 0; i < 5; ++i) {
      a.push_back(P.A(i, i));
      b.push_back(P.B(i, i));
    }
    for (const auto &e : triangular_eigenvalues(P, 1e-12)) {
      ASSERT_EQ(e.kind, EigenKind::Finite);
      ours.push_back(e.value());
    }
    EXPECT_LT(multiset_mismatch(ours, determinant_roots(a, b)), 1e-8);
  }
}

TEST(PencilCore, TriangularEigenvaluesScaleInvariant) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    auto P = stabpencil::test::random_upper_pencil<Complex>(4, rng);
    P.B(3, 3) = 0.0;
    const Complex gamma(g(rng), g(rng));
    Pencil<Complex> S = P;
    for (Index i = 0; i < 4; ++i) {
      S.A(i, i) *= gamma;
      S.B(i, i) *= gamma;
    }
    const auto e1 = triangular_eigenvalues(P, 1e-12);
    const auto e2 = triangular_eigenvalues(S, 1e-12);
    for (std::size_t i = 0; i < e1.size(); ++i) {
      EXPECT_EQ(e1[i].kind, e2[i].kind);
      if (e1[i].kind == EigenKind::Finite) EXPECT_LT(std::abs(e1[i].value() - e2[i].value()), 1e-12 * std::abs(e1[i].value()) + 1e-14);
    }
  }
}

TEST(PencilCore, NumericalRank) {
  EXPECT_EQ(numerical_rank(Eigen::MatrixXd::Zero(3, 3), 1e-12), 0);
  EXPECT_EQ(numerical_rank(Eigen::MatrixXd::Identity(3, 3), 1e-12), 3);

  std::mt19937_64 rng(3);
  const Matrix<Complex> u = gaussian_matrix<Complex>(4, 2, rng);
  const Matrix<Complex> v = gaussian_matrix<Complex>(4, 2, rng);
  const Matrix<Complex> M = u.col(0) * v.col(0).adjoint() + u.col(1) * v.col(1).adjoint();
  EXPECT_EQ(numerical_rank(M, 1e-10), 2);
}
