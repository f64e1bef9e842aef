#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "twinpulse/errors.hpp"
#include "twinpulse/pulse.hpp"
#include "twinpulse/pulse_sequence.hpp"
#include "twinpulse/su2.hpp"

namespace twinpulse {

/// Boundary values of Omega and Delta plus the accumulated phase eta = int Lambda dt.
template <typename Scalar>
struct AdiabaticBoundary {
  Scalar omega_i{0};
  Scalar omega_f{0};
  Scalar delta_i{0};
  Scalar delta_f{0};
  Scalar eta{0};

  [[nodiscard]] Scalar lambda_i() const { return std::hypot(omega_i, delta_i); }
  [[nodiscard]] Scalar lambda_f() const { return std::hypot(omega_f, delta_f); }
};

/// Boundary values of a pulse with eta from the pulse quadrature.
AdiabaticBoundary<double> adiabatic_boundary(const PulseShape& pulse,
                                             std::size_t samples = default_diagnostic_samples);

namespace detail {

template <typename Scalar>
void require_boundary(const AdiabaticBoundary<Scalar>& boundary) {
  if (!(boundary.lambda_i() > 0) || !(boundary.lambda_f() > 0)) {
    throw UsageError("adiabatic solution needs nonzero Lambda at both boundaries");
  }
}

template <typename Scalar>
void require_probability(Scalar p) {
  if (!(p >= 0 && p <= 1)) {
    throw UsageError("probability " + std::to_string(static_cast<double>(p)) + " outside [0, 1]");
  }
}

// Float noise just outside [0, 1] is clamped; anything larger signals misuse.
template <typename Scalar>
Scalar checked_probability(Scalar p) {
  constexpr Scalar slack = Scalar(1e-12);
  if (!(p >= -slack && p <= Scalar(1) + slack)) {
    throw NumericalError("formula produced probability " + std::to_string(static_cast<double>(p)));
  }
  return std::clamp(p, Scalar(0), Scalar(1));
}

inline void require_power_of_two(std::uint64_t n) {
  if (n == 0 || (n & (n - 1)) != 0) {
    throw UsageError("pulse count " + std::to_string(n) + " is not a power of two");
  }
}

}  // namespace detail

/// Adiabatic-limit Bloch map as a 3x3 rotation about the adiabatic axes.
template <typename Scalar>
Matrix3<Scalar> adiabatic_rotation(const AdiabaticBoundary<Scalar>& b) {
  detail::require_boundary(b);
  const Scalar li = b.lambda_i();
  const Scalar lf = b.lambda_f();
  const Scalar c = std::cos(b.eta);
  const Scalar s = std::sin(b.eta);
  const Scalar lilf = li * lf;
  Matrix3<Scalar> m;
  m << (b.omega_i * b.omega_f + b.delta_i * b.delta_f * c) / lilf, -b.delta_f * s / lf,
      (b.delta_i * b.omega_f - b.omega_i * b.delta_f * c) / lilf,  //
      b.delta_i * s / li, c, -b.omega_i * s / li,                   //
      (b.omega_i * b.delta_f - b.delta_i * b.omega_f * c) / lilf, b.omega_f * s / lf,
      (b.delta_i * b.delta_f + b.omega_i * b.omega_f * c) / lilf;
  return m;
}

/// Final Bloch vector in the adiabatic limit. Non-unit (mixed-state) inputs are mapped linearly.
template <typename Scalar>
BlochVector<Scalar> adiabatic_bloch(const AdiabaticBoundary<Scalar>& boundary, const BlochVector<Scalar>& initial) {
  return adiabatic_rotation(boundary) * initial;
}

/// Adiabatic single-pulse transition probability from state 1.
template <typename Scalar>
Scalar single_pulse_probability(const AdiabaticBoundary<Scalar>& b) {
  detail::require_boundary(b);
  const Scalar lilf = b.lambda_i() * b.lambda_f();
  return detail::checked_probability(Scalar(0.5) - b.delta_i * b.delta_f / (Scalar(2) * lilf) -
                                     b.omega_i * b.omega_f * std::cos(b.eta) / (Scalar(2) * lilf));
}

/**
 * Two-pulse transition probability |b|^2 of Phi(-phi) U_2 Phi(phi) U_1 with
 * U_1 = (sqrt(1-p) e^{i alpha}, sqrt(p) e^{i beta}):
 *
 *   identical                  4p(1-p) cos^2(alpha + phi/2)
 *   bichromatic                4p(1-p) sin^2(beta - phi/2)
 *   time_reflected             4p(1-p) sin^2(alpha - beta + phi/2)
 *   time_reflected_bichromatic 4p(1-p) cos^2(phi/2)
 *
 * The bichromatic and time_reflected rows differ from the commonly printed
 * forms by the sign of phi; see pair_probability_printed.
 */
template <typename Scalar>
Scalar pair_probability(CaseLabel label, Scalar p, Scalar alpha, Scalar beta, Scalar phi) {
  detail::require_probability(p);
  const Scalar weight = Scalar(4) * p * (Scalar(1) - p);
  const auto sq = [](Scalar x) { return x * x; };
  switch (label) {
    case CaseLabel::identical:
      return weight * sq(std::cos(alpha + phi / 2));
    case CaseLabel::bichromatic:
      return weight * sq(std::sin(beta - phi / 2));
    case CaseLabel::time_reflected:
      return weight * sq(std::sin(alpha - beta + phi / 2));
    case CaseLabel::time_reflected_bichromatic:
      return weight * sq(std::cos(phi / 2));
  }
  throw UsageError("unknown case label");
}

/// Where a printed two-pulse formula comes from: the summary table or the per-case derivation text.
enum class PrintedSource { table, text };

/**
 * The two-pulse formulas exactly as printed in the literature this toolkit
 * reproduces. Only the identical and time_reflected_bichromatic rows agree
 * with explicit composition; bichromatic (both sources) and time_reflected
 * (table) hold with phi -> -phi, time_reflected (text: cos^2) never holds.
 */
template <typename Scalar>
Scalar pair_probability_printed(CaseLabel label, PrintedSource source, Scalar p, Scalar alpha, Scalar beta,
                                Scalar phi) {
  detail::require_probability(p);
  const Scalar weight = Scalar(4) * p * (Scalar(1) - p);
  const auto sq = [](Scalar x) { return x * x; };
  switch (label) {
    case CaseLabel::identical:
      return weight * sq(std::cos(alpha + phi / 2));
    case CaseLabel::bichromatic:
      return weight * sq(std::sin(beta + phi / 2));
    case CaseLabel::time_reflected:
      return source == PrintedSource::table ? weight * sq(std::sin(alpha - beta - phi / 2))
                                            : weight * sq(std::cos(alpha - beta - phi / 2));
    case CaseLabel::time_reflected_bichromatic:
      return weight * sq(std::cos(phi / 2));
  }
  throw UsageError("unknown case label");
}

/// Bloch vector after the mirrored, detuning-flipped pair, starting from state 1.
template <typename Scalar>
BlochVector<Scalar> pair_bloch_case_d(Scalar p, Scalar alpha, Scalar beta, Scalar phi) {
  detail::require_probability(p);
  const Scalar root = std::sqrt(p * (Scalar(1) - p));
  const Scalar half = std::cos(phi / 2);
  const Scalar inner = alpha + beta + phi / 2;
  const Scalar outer = alpha + beta + Scalar(1.5) * phi;
  const Scalar u = Scalar(4) * root * half * ((Scalar(1) - p) * std::cos(inner) - p * std::cos(outer));
  const Scalar v = Scalar(4) * root * half * ((p - Scalar(1)) * std::sin(inner) + p * std::sin(outer));
  const Scalar w = Scalar(8) * p * (Scalar(1) - p) * half * half - Scalar(1);
  return {u, v, w};
}

/// Case (d) probability with single-pulse probability 1/2 - epsilon.
template <typename Scalar>
Scalar pair_error_bound(Scalar epsilon, Scalar phi) {
  if (!(std::abs(epsilon) < Scalar(0.5))) {
    throw UsageError("|epsilon| must be below 1/2");
  }
  const Scalar half = std::cos(phi / 2);
  return (Scalar(1) - Scalar(4) * epsilon * epsilon) * half * half;
}

/// Exact Cayley-Klein parameters of the equal-amplitude Cos-Sin pulse of area A.
template <typename Scalar>
SU2Propagator<Scalar> cos_sin_exact(Scalar area) {
  if (!(area >= 0)) {
    throw UsageError("pulse area must be non-negative");
  }
  const Scalar s = std::sqrt(area * area + Scalar(1));
  const Scalar quarter = std::numbers::pi_v<Scalar> * s / Scalar(4);
  const Scalar sn = std::sin(quarter);
  const Scalar cs = std::cos(quarter);
  const Scalar norm = std::numbers::sqrt2_v<Scalar> * s;
  const Complex<Scalar> a = (Complex<Scalar>(1, area) * sn + s * cs) / norm;
  const Complex<Scalar> b = (Complex<Scalar>(1, -area) * sn - s * cs) / norm;
  return {a, b};
}

template <typename Scalar>
Scalar cos_sin_single_p(Scalar area) {
  if (!(area >= 0)) {
    throw UsageError("pulse area must be non-negative");
  }
  const Scalar s = std::sqrt(area * area + Scalar(1));
  return detail::checked_probability(Scalar(0.5) -
                                     std::sin(std::numbers::pi_v<Scalar> * s / Scalar(2)) / (Scalar(2) * s));
}

/// Case (d) pair of Cos-Sin pulses of area A split by phi.
template <typename Scalar>
Scalar cos_sin_pair_P(Scalar area, Scalar phi) {
  if (!(area >= 0)) {
    throw UsageError("pulse area must be non-negative");
  }
  const Scalar s2 = area * area + Scalar(1);
  const Scalar sn = std::sin(std::numbers::pi_v<Scalar> * std::sqrt(s2) / Scalar(2));
  const Scalar half = std::cos(phi / 2);
  return detail::checked_probability((Scalar(1) - sn * sn / s2) * half * half);
}

/// Probability of the N = 2^n concatenated sequence with pi/2 splits, single-pulse probability p.
template <typename Scalar>
Scalar concat_P(Scalar p, std::uint64_t n_pulses) {
  detail::require_probability(p);
  detail::require_power_of_two(n_pulses);
  return detail::checked_probability(
      Scalar(0.5) * (Scalar(1) - std::pow(Scalar(1) - Scalar(2) * p, static_cast<Scalar>(n_pulses))));
}

template <typename Scalar>
Scalar cos_sin_concat_P(Scalar area, std::uint64_t n_pulses) {
  if (!(area >= 0)) {
    throw UsageError("pulse area must be non-negative");
  }
  detail::require_power_of_two(n_pulses);
  const Scalar s = std::sqrt(area * area + Scalar(1));
  const Scalar ratio = std::sin(std::numbers::pi_v<Scalar> * s / Scalar(2)) / s;
  return detail::checked_probability(Scalar(0.5) * (Scalar(1) - std::pow(ratio, static_cast<Scalar>(n_pulses))));
}

/// exp(-i H tau) for constant Omega, Delta.
template <typename Scalar>
SU2Propagator<Scalar> constant_exact(Scalar omega, Scalar delta, Scalar duration) {
  const Scalar lambda = std::hypot(omega, delta);
  if (lambda == 0) {
    return SU2Propagator<Scalar>::identity();
  }
  const Scalar angle = lambda * duration / Scalar(2);
  const Scalar sn = std::sin(angle);
  return {Complex<Scalar>(std::cos(angle), delta * sn / lambda), Complex<Scalar>(0, -omega * sn / lambda)};
}

}  // namespace twinpulse
