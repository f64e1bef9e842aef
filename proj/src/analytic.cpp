#include "twinpulse/analytic.hpp"

namespace twinpulse {

AdiabaticBoundary<double> adiabatic_boundary(const PulseShape& pulse, std::size_t samples) {
  const AdiabaticityReport report = adiabaticity(pulse, samples);
  AdiabaticBoundary<double> boundary;
  boundary.omega_i = pulse.omega(pulse.t_start());
  boundary.delta_i = pulse.delta(pulse.t_start());
  boundary.omega_f = pulse.omega(pulse.t_end());
  boundary.delta_f = pulse.delta(pulse.t_end());
  boundary.eta = report.eta;
  return boundary;
}

}  // namespace twinpulse
