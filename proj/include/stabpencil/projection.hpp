#pragma once

#include "stabpencil/pencil.hpp"

#include <optional>
#include <string>

namespace stabpencil {

/// Closed eigenvalue region Omega.
///   Hurwitz: closed left half-plane together with the point at infinity.
///   Schur:   closed unit disc.
enum class StabilityRegion { Hurwitz, Schur };

inline std::string to_string(StabilityRegion r) {
  return r == StabilityRegion::Hurwitz ? "hurwitz" : "schur";
}

struct ProjectionResult {
  ScalarPencil projected;
  double residual_distance = 0.0;
  bool on_medial_axis = false;
  std::optional<double> lambda; // Hurwitz Lagrange multiplier
  std::optional<double> alpha;  // Hurwitz ratio ||s||^2 / (2 Re(a conj(b)))
};

/// Threshold on |alpha + 1| below which a Hurwitz input is treated as lying on the medial axis.
inline constexpr double kHurwitzMedialTol = 1e-10;

/// Re(a conj(b)) = a1 a3 + a2 a4 in real coordinates.
inline double hurwitz_pairing(const ScalarPencil &s) { return (s.a * std::conj(s.b)).real(); }

inline bool is_stable_scalar(StabilityRegion region, const ScalarPencil &s, double tol = 0.0) {
  if (region == StabilityRegion::Hurwitz) return hurwitz_pairing(s) >= -tol;
  return std::abs(s.a) <= std::abs(s.b) + tol;
}

namespace detail {

inline ProjectionResult project_hurwitz(const ScalarPencil &s) {
  ProjectionResult r;
  const double c = hurwitz_pairing(s);
  if (c >= 0.0) {
    r.projected = s;
    return r;
  }
  const double alpha = s.norm_sq() / (2.0 * c);
  r.alpha = alpha;
  if (std::abs(alpha + 1.0) <= kHurwitzMedialTol) {
    // b = -a: every point (a + beta, beta) with |beta + a/2| = |a|/2 is nearest; take beta = 0.
    r.projected = {s.a, Complex(0.0)};
    r.residual_distance = (s - r.projected).norm();
    r.on_medial_axis = true;
    r.lambda = -1.0;
    return r;
  }
  // lambda = alpha + sqrt(alpha^2 - 1), written as its reciprocal partner to avoid cancellation.
  const double lambda = 1.0 / (alpha - std::sqrt(alpha * alpha - 1.0));
  r.lambda = lambda;
  const double inv = 1.0 / (1.0 - lambda * lambda);
  r.projected = {inv * (s.a - lambda * s.b), inv * (s.b - lambda * s.a)};
  r.residual_distance = std::sqrt(c * lambda);
  return r;
}

inline ProjectionResult project_schur(const ScalarPencil &s) {
  ProjectionResult r;
  const double na = std::abs(s.a);
  const double nb = std::abs(s.b);
  if (na <= nb) {
    r.projected = s;
    return r;
  }
  r.residual_distance = (na - nb) / std::sqrt(2.0);
  if (nb == 0.0) {
    // Any (a, a_hat)/2 with |a_hat| = |a| is nearest; take a_hat = a (eigenvalue -1).
    r.projected = {0.5 * s.a, 0.5 * s.a};
    r.on_medial_axis = true;
    return r;
  }
  const double m = 0.5 * (na + nb);
  r.projected = {(m / na) * s.a, (m / nb) * s.b};
  return r;
}

} // namespace detail

/// Nearest point of the closure of the stable 1x1 pencils to `s`.
inline ProjectionResult project(StabilityRegion region, const ScalarPencil &s) {
  return region == StabilityRegion::Hurwitz ? detail::project_hurwitz(s) : detail::project_schur(s);
}

/// True where the projection is not unique (and hence not differentiable).
inline bool on_medial_axis(StabilityRegion region, const ScalarPencil &s) {
  if (is_stable_scalar(region, s)) return false;
  if (region == StabilityRegion::Hurwitz) {
    const double alpha = s.norm_sq() / (2.0 * hurwitz_pairing(s));
    return std::abs(alpha + 1.0) <= kHurwitzMedialTol;
  }
  return s.b == Complex(0.0);
}

/// Directional derivative of `project(region, .)` at `s` along `ds`, as a real-linear map on C^2.
///
/// On the closed stable set the projection is the identity and so is its derivative; this is
/// the one-sided rule used on the boundary. Throws NonDifferentiableError on the medial axis.
inline ScalarPencil dproject(StabilityRegion region, const ScalarPencil &s, const ScalarPencil &ds) {
  if (is_stable_scalar(region, s)) return ds;
  if (on_medial_axis(region, s))
    throw NonDifferentiableError("dproject: input lies on the medial axis of the projection");

  if (region == StabilityRegion::Hurwitz) {
    const double c = hurwitz_pairing(s);
    const double norm2 = s.norm_sq();
    const double alpha = norm2 / (2.0 * c);
    const double root = std::sqrt(alpha * alpha - 1.0);
    const double lambda = 1.0 / (alpha - root);

    const double dnorm2 = 2.0 * ((std::conj(s.a) * ds.a).real() + (std::conj(s.b) * ds.b).real());
    const double dc = (ds.a * std::conj(s.b) + s.a * std::conj(ds.b)).real();
    const double dalpha = dnorm2 / (2.0 * c) - norm2 * dc / (2.0 * c * c);
    const double dlambda = (1.0 + alpha / root) * dalpha;

    const double one_minus = 1.0 - lambda * lambda;
    const double outer = 2.0 * lambda * dlambda / (one_minus * one_minus);
    const ScalarPencil base{s.a - lambda * s.b, s.b - lambda * s.a};
    const ScalarPencil lin{ds.a - lambda * ds.b - dlambda * s.b, ds.b - lambda * ds.a - dlambda * s.a};
    return base * outer + lin * (1.0 / one_minus);
  }

  const double na = std::abs(s.a);
  const double nb = std::abs(s.b);
  const double ac = (std::conj(s.a) * ds.a).real();
  const double bd = (std::conj(s.b) * ds.b).real();
  const Complex da = 0.5 * (ds.a + (bd / (na * nb)) * s.a - (ac * nb / (na * na * na)) * s.a + (nb / na) * ds.a);
  const Complex db = 0.5 * (ds.b + (ac / (na * nb)) * s.b - (bd * na / (nb * nb * nb)) * s.b + (na / nb) * ds.b);
  return {da, db};
}

} // namespace stabpencil
