#include "twinpulse/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Core>

#include "twinpulse/errors.hpp"

namespace twinpulse {

namespace {

using Matrix = Eigen::Matrix2cd;

constexpr std::size_t adaptive_step_limit = 50'000'000;

Matrix generator(const PulseShape& pulse, double t) {
  const double om = pulse.omega(t);
  const double de = pulse.delta(t);
  if (!std::isfinite(om) || !std::isfinite(de)) {
    throw NumericalError("non-finite Hamiltonian sample at t = " + std::to_string(t));
  }
  // -i H with H = (1/2)[[-Delta, Omega], [Omega, Delta]]
  const std::complex<double> minus_half_i(0.0, -0.5);
  Matrix g;
  g << -de * minus_half_i, om * minus_half_i, om * minus_half_i, de * minus_half_i;
  return g;
}

double su2_defect(const Matrix& u) {
  return std::max({std::abs(u.col(0).squaredNorm() - 1.0), std::abs(u(0, 1) + std::conj(u(1, 0))),
                   std::abs(u(1, 1) - std::conj(u(0, 0)))});
}

// Projects back onto Cayley-Klein form; drift past the rejection threshold means the step is too coarse.
void project(Matrix& u, double t) {
  const double defect = su2_defect(u);
  if (defect > UnitarityTolerance<double>::reject) {
    throw NumericalError("unitarity drift " + std::to_string(defect) + " at t = " + std::to_string(t) +
                         ": step size too large");
  }
  u = Propagator::from_matrix(u).matrix();
}

Matrix rk4(const PulseShape& pulse, std::size_t steps, std::size_t renormalize_every) {
  const double t0 = pulse.t_start();
  const double h = pulse.duration() / static_cast<double>(steps);
  Matrix u = Matrix::Identity();
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = t0 + h * static_cast<double>(n);
    const Matrix g1 = generator(pulse, t);
    const Matrix g2 = generator(pulse, t + 0.5 * h);
    const Matrix g3 = generator(pulse, t + h);
    const Matrix k1 = g1 * u;
    const Matrix k2 = g2 * (u + 0.5 * h * k1);
    const Matrix k3 = g2 * (u + 0.5 * h * k2);
    const Matrix k4 = g3 * (u + h * k3);
    u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if ((n + 1) % renormalize_every == 0) {
      project(u, t + h);
    }
  }
  project(u, pulse.t_end());
  return u;
}

Matrix dormand_prince(const PulseShape& pulse, double tolerance, std::size_t renormalize_every) {
  // Dormand-Prince 5(4) tableau
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                   e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

  const double t_end = pulse.t_end();
  double t = pulse.t_start();
  double h = pulse.duration() / 100.0;
  Matrix u = Matrix::Identity();
  Matrix k1 = generator(pulse, t) * u;
  std::size_t accepted = 0;
  std::size_t attempts = 0;
  while (t < t_end) {
    if (++attempts > adaptive_step_limit) {
      throw NumericalError("adaptive integrator exceeded its step limit at t = " + std::to_string(t));
    }
    h = std::min(h, t_end - t);
    const Matrix k2 = generator(pulse, t + c2 * h) * (u + h * a21 * k1);
    const Matrix k3 = generator(pulse, t + c3 * h) * (u + h * (a31 * k1 + a32 * k2));
    const Matrix k4 = generator(pulse, t + c4 * h) * (u + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Matrix k5 = generator(pulse, t + c5 * h) * (u + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Matrix k6 =
        generator(pulse, t + h) * (u + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Matrix next = u + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Matrix k7 = generator(pulse, t + h) * next;
    const Matrix error = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double ratio = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double scale = tolerance * (1.0 + std::abs(next(i)));
      ratio = std::max(ratio, std::abs(error(i)) / scale);
    }
    if (ratio <= 1.0) {
      t = (t_end - t <= h) ? t_end : t + h;
      u = next;
      k1 = k7;
      if (++accepted % renormalize_every == 0) {
        project(u, t);
        k1 = generator(pulse, t) * u;
      }
    }
    const double factor = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
    h *= factor;
  }
  project(u, t_end);
  return u;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (step_count < 10) {
    throw UsageError("integrator needs at least 10 steps per pulse");
  }
  if (tolerance && !(*tolerance >= 1e-14 && *tolerance <= 1e-6)) {
    throw UsageError("integrator tolerance must lie in [1e-14, 1e-6]");
  }
  if (renormalize_every < 1) {
    throw UsageError("renormalize_every must be at least 1");
  }
}

Propagator propagate(const PulseShape& pulse, const IntegratorConfig& cfg) {
  cfg.validate();
  const Matrix u = cfg.tolerance ? dormand_prince(pulse, *cfg.tolerance, cfg.renormalize_every)
                                 : rk4(pulse, cfg.step_count, cfg.renormalize_every);
  return Propagator::from_matrix(u);
}

Propagator propagate_sequence(const PulseSequence& sequence, const IntegratorConfig& cfg) {
  Propagator total;
  for (const SequenceItem& item : sequence.items()) {
    total = compose(phase_sandwich(propagate(item.pulse, cfg), item.phase_jump), total);
  }
  return total;
}

}  // namespace twinpulse
