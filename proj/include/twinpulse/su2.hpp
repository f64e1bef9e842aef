#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "twinpulse/errors.hpp"

namespace twinpulse {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using Matrix2c = Eigen::Matrix<Complex<Scalar>, 2, 2>;

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

/// Bloch vector (u, v, w) with u = 2 Re rho_12, v = 2 Im rho_12, w = rho_22 - rho_11.
template <typename Scalar>
using BlochVector = Vector3<Scalar>;

/// Norm-drift thresholds for Cayley-Klein pairs. Drift up to `renormalize`
/// is left alone, drift up to `reject` is rescaled away, anything larger is an error.
template <typename Scalar>
struct UnitarityTolerance {
  static constexpr Scalar renormalize = Scalar(1e-12);
  static constexpr Scalar reject = Scalar(1e-9);
};

template <>
struct UnitarityTolerance<float> {
  static constexpr float renormalize = 1e-6f;
  static constexpr float reject = 1e-4f;
};

enum class PauliAxis { x, y, z };

/// Mirrored-pulse symmetry classes: parity of Omega, then parity of Delta.
enum class TimeReversal { sym_sym, anti_anti, sym_anti, anti_sym };

/**
 * SU(2) propagator in Cayley-Klein form
 *
 *     U = [[ a, -b* ],
 *          [ b,  a* ]]
 *
 * Construction enforces |a|^2 + |b|^2 = 1: drift below 1e-9 is normalised away,
 * larger drift throws UnitarityError.
 */
template <typename Scalar>
class SU2Propagator {
 public:
  using complex_type = Complex<Scalar>;

  SU2Propagator() : a_(1), b_(0) {}

  SU2Propagator(complex_type a, complex_type b) : a_(a), b_(b) { enforce_unitarity(); }

  static SU2Propagator identity() { return SU2Propagator(); }

  /// Reads a, b from the first column and checks the second column matches.
  static SU2Propagator from_matrix(const Matrix2c<Scalar>& m) {
    const Scalar mismatch = std::max(std::abs(m(0, 1) + std::conj(m(1, 0))),
                                     std::abs(m(1, 1) - std::conj(m(0, 0))));
    if (!(mismatch <= UnitarityTolerance<Scalar>::reject)) {
      throw UnitarityError("matrix is not of Cayley-Klein form (column mismatch " +
                           std::to_string(static_cast<double>(mismatch)) + ")");
    }
    return SU2Propagator((m(0, 0) + std::conj(m(1, 1))) / Scalar(2),
                         (m(1, 0) - std::conj(m(0, 1))) / Scalar(2));
  }

  [[nodiscard]] complex_type a() const { return a_; }
  [[nodiscard]] complex_type b() const { return b_; }

  /// Transition probability out of state 1.
  [[nodiscard]] Scalar probability() const { return std::norm(b_); }

  [[nodiscard]] Scalar norm_drift() const { return std::abs(std::norm(a_) + std::norm(b_) - Scalar(1)); }

  [[nodiscard]] Matrix2c<Scalar> matrix() const {
    Matrix2c<Scalar> m;
    m << a_, -std::conj(b_), b_, std::conj(a_);
    return m;
  }

  [[nodiscard]] SU2Propagator adjoint() const { return {std::conj(a_), -b_}; }

  [[nodiscard]] SU2Propagator transpose() const { return {a_, -std::conj(b_)}; }

 private:
  void enforce_unitarity() {
    if (!std::isfinite(a_.real()) || !std::isfinite(a_.imag()) || !std::isfinite(b_.real()) ||
        !std::isfinite(b_.imag())) {
      throw UnitarityError("non-finite Cayley-Klein parameter");
    }
    const Scalar drift = norm_drift();
    if (drift > UnitarityTolerance<Scalar>::reject) {
      throw UnitarityError("|a|^2 + |b|^2 deviates from 1 by " + std::to_string(static_cast<double>(drift)));
    }
    if (drift > UnitarityTolerance<Scalar>::renormalize) {
      const Scalar scale = Scalar(1) / std::sqrt(std::norm(a_) + std::norm(b_));
      a_ *= scale;
      b_ *= scale;
    }
  }

  complex_type a_;
  complex_type b_;
};

/// Diagonal phase gate Phi(phi) = diag(e^{i phi/2}, e^{-i phi/2}).
template <typename Scalar>
struct PhaseGate {
  Scalar phi{0};

  [[nodiscard]] Matrix2c<Scalar> matrix() const {
    const Complex<Scalar> half = std::polar(Scalar(1), phi / Scalar(2));
    Matrix2c<Scalar> m;
    m << half, Scalar(0), Scalar(0), std::conj(half);
    return m;
  }

  /// As a propagator: a = e^{i phi/2}, b = 0.
  [[nodiscard]] SU2Propagator<Scalar> propagator() const {
    return {std::polar(Scalar(1), phi / Scalar(2)), Complex<Scalar>(0)};
  }

  [[nodiscard]] PhaseGate conjugate() const { return {-phi}; }
};

/// Phi(pi/2), the internal split of concatenated sequences.
template <typename Scalar>
inline PhaseGate<Scalar> half_pi_gate() {
  return {std::numbers::pi_v<Scalar> / Scalar(2)};
}

/// Polar form a = sqrt(1-p) e^{i alpha}, b = sqrt(p) e^{i beta}; phases on (-pi, pi].
template <typename Scalar>
struct PolarForm {
  Scalar p{0};
  Scalar alpha{0};
  Scalar beta{0};
  /// alpha is meaningless when p == 1 and was set to 0.
  bool alpha_undefined{false};
  /// beta is meaningless when p == 0 and was set to 0.
  bool beta_undefined{false};

  [[nodiscard]] SU2Propagator<Scalar> propagator() const {
    return {std::polar(std::sqrt(Scalar(1) - p), alpha), std::polar(std::sqrt(p), beta)};
  }
};

namespace detail {

// std::arg returns [-pi, pi]; fold -pi onto pi.
template <typename Scalar>
Scalar principal_arg(const Complex<Scalar>& z) {
  const Scalar angle = std::arg(z);
  return angle == -std::numbers::pi_v<Scalar> ? std::numbers::pi_v<Scalar> : angle;
}

template <typename Scalar>
void require_unitary(const SU2Propagator<Scalar>& u, const char* what) {
  if (u.norm_drift() > UnitarityTolerance<Scalar>::reject) {
    throw UnitarityError(std::string(what) + ": operand violates unitarity");
  }
}

}  // namespace detail

/// Matrix product second * first (first acts first).
template <typename Scalar>
SU2Propagator<Scalar> compose(const SU2Propagator<Scalar>& second, const SU2Propagator<Scalar>& first) {
  detail::require_unitary(second, "compose");
  detail::require_unitary(first, "compose");
  const auto c = second.a();
  const auto d = second.b();
  return {c * first.a() - std::conj(d) * first.b(), d * first.a() + std::conj(c) * first.b()};
}

template <typename Scalar>
SU2Propagator<Scalar> operator*(const SU2Propagator<Scalar>& second, const SU2Propagator<Scalar>& first) {
  return compose(second, first);
}

template <typename Scalar>
SU2Propagator<Scalar> operator*(const PhaseGate<Scalar>& gate, const SU2Propagator<Scalar>& u) {
  return compose(gate.propagator(), u);
}

template <typename Scalar>
SU2Propagator<Scalar> operator*(const SU2Propagator<Scalar>& u, const PhaseGate<Scalar>& gate) {
  return compose(u, gate.propagator());
}

/// Phi(-phi) U Phi(phi): the propagator of the same pulse with Omega -> Omega e^{i phi}.
template <typename Scalar>
SU2Propagator<Scalar> phase_sandwich(const SU2Propagator<Scalar>& u, Scalar phi) {
  return {u.a(), u.b() * std::polar(Scalar(1), phi)};
}

/// sigma_k U sigma_k. Axis x is the Delta -> -Delta image of the pulse.
template <typename Scalar>
SU2Propagator<Scalar> sigma_conjugate(const SU2Propagator<Scalar>& u, PauliAxis axis) {
  switch (axis) {
    case PauliAxis::x:
      return {std::conj(u.a()), -std::conj(u.b())};
    case PauliAxis::y:
      return {std::conj(u.a()), std::conj(u.b())};
    case PauliAxis::z:
      return {u.a(), -u.b()};
  }
  throw std::invalid_argument("sigma_conjugate: unknown axis");
}

/**
 * Propagator of the mirror-image pulse H_2(t) = +/- H_1(-t), with signs of Omega
 * and Delta following the symmetry class:
 *   sym_sym   -> U^T
 *   anti_anti -> U^dagger
 *   sym_anti  -> sigma_x U^T sigma_x  (= sigma_z U^dagger sigma_z)
 *   anti_sym  -> sigma_z U^T sigma_z  (= sigma_x U^dagger sigma_x)
 */
template <typename Scalar>
SU2Propagator<Scalar> time_reversal_variant(const SU2Propagator<Scalar>& u, TimeReversal symmetry) {
  switch (symmetry) {
    case TimeReversal::sym_sym:
      return u.transpose();
    case TimeReversal::anti_anti:
      return u.adjoint();
    case TimeReversal::sym_anti:
      return sigma_conjugate(u.transpose(), PauliAxis::x);
    case TimeReversal::anti_sym:
      return sigma_conjugate(u.transpose(), PauliAxis::z);
  }
  throw std::invalid_argument("time_reversal_variant: unknown symmetry");
}

/// sigma_z U^dagger sigma_z, written U-bar in the concatenation formulas.
template <typename Scalar>
SU2Propagator<Scalar> mirror_bar(const SU2Propagator<Scalar>& u) {
  return time_reversal_variant(u, TimeReversal::sym_anti);
}

template <typename Scalar>
PolarForm<Scalar> polar_decompose(const SU2Propagator<Scalar>& u) {
  detail::require_unitary(u, "polar_decompose");
  PolarForm<Scalar> out;
  out.p = std::clamp(std::norm(u.b()), Scalar(0), Scalar(1));
  if (u.a() == Complex<Scalar>(0)) {
    out.alpha_undefined = true;
  } else {
    out.alpha = detail::principal_arg(u.a());
  }
  if (u.b() == Complex<Scalar>(0)) {
    out.beta_undefined = true;
  } else {
    out.beta = detail::principal_arg(u.b());
  }
  return out;
}

/// Final Bloch vector for a system starting in state 1, w = -1.
/// u + iv = 2 rho_12 with rho = psi psi^dagger and psi = (a, b), so v = -2 Im(a* b).
template <typename Scalar>
BlochVector<Scalar> to_bloch(const SU2Propagator<Scalar>& u) {
  const Complex<Scalar> overlap = u.a() * std::conj(u.b());
  return {Scalar(2) * overlap.real(), Scalar(2) * overlap.imag(), std::norm(u.b()) - std::norm(u.a())};
}

/// SO(3) image of U acting on Bloch vectors: r_f = R r_i for rho -> U rho U^dagger.
template <typename Scalar>
Matrix3<Scalar> bloch_rotation(const SU2Propagator<Scalar>& u) {
  const Matrix2c<Scalar> m = u.matrix();
  Matrix3<Scalar> rotation;
  for (int axis = 0; axis < 3; ++axis) {
    Vector3<Scalar> r = Vector3<Scalar>::Zero();
    r(axis) = Scalar(1);
    // traceless part of rho for Bloch vector r
    Matrix2c<Scalar> rho;
    rho << Complex<Scalar>(-r(2) / 2), Complex<Scalar>(r(0), r(1)) / Scalar(2),
        Complex<Scalar>(r(0), -r(1)) / Scalar(2), Complex<Scalar>(r(2) / 2);
    const Matrix2c<Scalar> evolved = m * rho * m.adjoint();
    rotation(0, axis) = Scalar(2) * evolved(0, 1).real();
    rotation(1, axis) = Scalar(2) * evolved(0, 1).imag();
    rotation(2, axis) = (evolved(1, 1) - evolved(0, 0)).real();
  }
  return rotation;
}

}  // namespace twinpulse
