#pragma once

#include <cstddef>
#include <optional>

#include "twinpulse/pulse.hpp"
#include "twinpulse/pulse_sequence.hpp"
#include "twinpulse/su2.hpp"

namespace twinpulse {

using Propagator = SU2Propagator<double>;

struct IntegratorConfig {
  /// Fixed RK4 steps per pulse.
  std::size_t step_count{20000};
  /// When set, switches to adaptive Dormand-Prince 5(4) with this local error tolerance.
  std::optional<double> tolerance;
  /// Steps between projections back onto SU(2).
  std::size_t renormalize_every{100};

  /// Throws UsageError unless step_count >= 10, tolerance in [1e-14, 1e-6], renormalize_every >= 1.
  void validate() const;
};

/// U(t_end, t_start) for i dU/dt = H(t) U, H = (1/2)[[-Delta, Omega], [Omega, Delta]].
Propagator propagate(const PulseShape& pulse, const IntegratorConfig& cfg = {});

/// Product of the per-pulse propagators, each phase-sandwiched by its phase jump.
Propagator propagate_sequence(const PulseSequence& sequence, const IntegratorConfig& cfg = {});

}  // namespace twinpulse
