#pragma once

#include <optional>
#include <string_view>

#include "twinpulse/integrator.hpp"
#include "twinpulse/pulse_sequence.hpp"
#include "twinpulse/su2.hpp"

namespace twinpulse {

enum class EvaluationMethod { analytic, numerical };

struct SequenceEvaluation {
  Propagator propagator;
  double probability{0};
  BlochVector<double> bloch{0, 0, -1};
  EvaluationMethod method{EvaluationMethod::numerical};
};

PulseTransform transform_for(CaseLabel label);

/// Two-pulse sequence: `first`, then the arranged second pulse carrying phase phi.
/// Propagator semantics Phi(-phi) U_2 Phi(phi) U_1.
PulseSequence build_pair(const PulseShape& first, CaseLabel label, double phi);

/// The time-reflected, detuning-flipped image of a sequence, placed from `t_start`.
/// Its propagator is sigma_z U^dagger sigma_z of the original.
PulseSequence mirror_sequence(const PulseSequence& sequence, double t_start);

/**
 * Doubles a mirrored-pair sequence: U_{2N}(phi) = Ubar_N Phi(phi) U_N, where U_N is
 * `base` with its outermost split re-targeted to pi/2. The stored propagator also
 * carries the leading gate Phi(-phi), which leaves the probability unchanged.
 *
 * `base` must be a bare pulse or a time_reflected_bichromatic pair/concatenation
 * whose second half is the mirror image of its first half; otherwise UsageError.
 */
PulseSequence concatenate(const PulseSequence& base, double phi);

/// N = 2^depth pulses built from `first` by repeated concatenation, outer split phi.
PulseSequence build_concatenated(const PulseShape& first, int depth, double phi);

/// Mirror-symmetry check used by concatenate.
bool has_mirror_structure(const PulseSequence& sequence);

/// Same sequence with its outermost split phase replaced.
PulseSequence with_outer_phase(const PulseSequence& sequence, double phi);

/// Closed-form propagator of one pulse; UnsupportedError for shapes without one.
Propagator analytic_propagator(const PulseShape& pulse);

/// Analytic evaluation composes closed-form propagators (Cos-Sin with equal
/// amplitudes, constant pulses) through the mirror/flip relations; numerical
/// integrates every pulse. A missing config uses the integrator defaults.
SequenceEvaluation evaluate(const PulseSequence& sequence, EvaluationMethod method,
                            const std::optional<IntegratorConfig>& cfg = std::nullopt);

/**
 * Product of an operator word such as "Ub Ps U F Ub P U", read left to right as
 * a matrix product: U = base, Ub = sigma_z U^dagger sigma_z, P = Phi(pi/2),
 * Ps = Phi(-pi/2), F = Phi(phi).
 */
Propagator evaluate_operator_word(std::string_view word, const Propagator& base, double phi);

/// The word for U_N(phi) generated by the substitution U -> U_{N/2}(pi/2) in Ubar Phi(phi) U.
std::string concatenated_operator_word(int depth);

}  // namespace twinpulse
