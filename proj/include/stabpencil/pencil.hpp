#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace stabpencil {

using Complex = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

enum class Field { Complex, Real };

template <typename Scalar>
inline constexpr bool is_complex_v = Eigen::NumTraits<Scalar>::IsComplex;

template <typename Scalar>
inline constexpr Field field_of = is_complex_v<Scalar> ? Field::Complex : Field::Real;

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Inputs that violate a documented precondition (sizes, triangularity, unitarity, options).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Raised where a derivative does not exist (projection medial axis).
class NonDifferentiableError : public Error {
public:
  using Error::Error;
};

/// Coerce a complex value into Scalar. For real Scalar the imaginary part is dropped.
template <typename Scalar>
Scalar from_complex(const Complex &z) {
  if constexpr (is_complex_v<Scalar>) {
    return z;
  } else {
    return z.real();
  }
}

/// The pencil A + xB. `A` is the trailing and `B` the leading coefficient.
template <typename Scalar>
struct Pencil {
  Matrix<Scalar> A;
  Matrix<Scalar> B;

  Pencil() = default;
  Pencil(Matrix<Scalar> a, Matrix<Scalar> b) : A(std::move(a)), B(std::move(b)) {
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
      throw ValidationError("pencil coefficients must be square and of equal size");
  }

  static Pencil Zero(Index n) { return {Matrix<Scalar>::Zero(n, n), Matrix<Scalar>::Zero(n, n)}; }

  Index size() const { return A.rows(); }
  static constexpr Field field() { return field_of<Scalar>; }

  Pencil operator-(const Pencil &o) const { return {A - o.A, B - o.B}; }
  Pencil operator+(const Pencil &o) const { return {A + o.A, B + o.B}; }
  Pencil operator*(double s) const { return {A * s, B * s}; }
};

/// A single diagonal entry a + xb.
struct ScalarPencil {
  Complex a{0.0, 0.0};
  Complex b{0.0, 0.0};

  ScalarPencil operator+(const ScalarPencil &o) const { return {a + o.a, b + o.b}; }
  ScalarPencil operator-(const ScalarPencil &o) const { return {a - o.a, b - o.b}; }
  ScalarPencil operator*(double s) const { return {a * s, b * s}; }
  double norm_sq() const { return std::norm(a) + std::norm(b); }
  double norm() const { return std::sqrt(norm_sq()); }
};

inline ScalarPencil operator*(double s, const ScalarPencil &p) { return p * s; }

template <typename Scalar>
ScalarPencil diagonal_entry(const Pencil<Scalar> &P, Index i) {
  return {Complex(P.A(i, i)), Complex(P.B(i, i))};
}

enum class EigenKind { Finite, Infinite, Indeterminate };

/// A root of a diagonal entry a + xb, kept in homogeneous form.
struct GeneralizedEigenvalue {
  Complex a;
  Complex b;
  EigenKind kind = EigenKind::Indeterminate;

  /// -a/b for finite eigenvalues; NaN otherwise.
  Complex value() const {
    if (kind != EigenKind::Finite) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    return -a / b;
  }
};

inline std::string to_string(EigenKind k) {
  switch (k) {
  case EigenKind::Finite: return "finite";
  case EigenKind::Infinite: return "infinite";
  case EigenKind::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

/// Squared Frobenius norm of the pencil, i.e. ||[A B]||_F^2.
template <typename Scalar>
double norm_sq(const Pencil<Scalar> &P) {
  return P.A.squaredNorm() + P.B.squaredNorm();
}

template <typename Scalar>
double distance(const Pencil<Scalar> &P, const Pencil<Scalar> &R) {
  if (P.size() != R.size()) throw ValidationError("distance: pencil sizes differ");
  return std::sqrt((P.A - R.A).squaredNorm() + (P.B - R.B).squaredNorm());
}

template <typename Scalar>
double strictly_lower_max(const Matrix<Scalar> &M) {
  double m = 0.0;
  for (Index j = 0; j < M.cols(); ++j)
    for (Index i = j + 1; i < M.rows(); ++i) m = std::max(m, std::abs(M(i, j)));
  return m;
}

/// Classify a diagonal pair. `abs_tol` is an absolute threshold on max(|a|, |b|).
inline GeneralizedEigenvalue classify_root(const Complex &a, const Complex &b, double abs_tol) {
  GeneralizedEigenvalue ev{a, b, EigenKind::Indeterminate};
  if (std::max(std::abs(a), std::abs(b)) <= abs_tol) return ev;
  ev.kind = (b == Complex(0.0)) ? EigenKind::Infinite : EigenKind::Finite;
  return ev;
}

/// Eigenvalues of an upper triangular pencil, read off its diagonal.
/// Both the triangularity check and the singular-entry threshold are relative
/// to ||P||_F.
template <typename Scalar>
std::vector<GeneralizedEigenvalue> triangular_eigenvalues(const Pencil<Scalar> &P, double tol) {
  const double scale = std::sqrt(norm_sq(P));
  const double abs_tol = tol * scale;
  if (std::max(strictly_lower_max(P.A), strictly_lower_max(P.B)) > abs_tol)
    throw ValidationError("triangular_eigenvalues: pencil is not upper triangular");
  std::vector<GeneralizedEigenvalue> out;
  out.reserve(static_cast<std::size_t>(P.size()));
  for (Index i = 0; i < P.size(); ++i) {
    const ScalarPencil d = diagonal_entry(P, i);
    out.push_back(classify_root(d.a, d.b, abs_tol));
  }
  return out;
}

template <typename Derived>
Eigen::VectorXd singular_values(const Eigen::MatrixBase<Derived> &M) {
  using Plain = typename Derived::PlainObject;
  if (M.size() == 0) return Eigen::VectorXd();
  Eigen::JacobiSVD<Plain> svd(M.eval());
  return svd.singularValues();
}

/// Number of singular values strictly greater than `tol`.
template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived> &M, double tol) {
  const Eigen::VectorXd s = singular_values(M);
  return static_cast<Index>((s.array() > tol).count());
}

/// Keep the upper triangle (including the diagonal) of M.
template <typename Scalar>
Matrix<Scalar> upper_part(const Matrix<Scalar> &M) {
  return M.template triangularView<Eigen::Upper>();
}

/// Zero the strictly upper triangle of M (keeps the diagonal).
template <typename Scalar>
Matrix<Scalar> lower_part(const Matrix<Scalar> &M) {
  return M.template triangularView<Eigen::Lower>();
}

} // namespace stabpencil
