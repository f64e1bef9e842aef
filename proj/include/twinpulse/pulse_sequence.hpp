#pragma once

#include <optional>
#include <vector>

#include "twinpulse/pulse.hpp"

namespace twinpulse {

/// The four second-pulse arrangements of a twin-pulse pair.
enum class CaseLabel { identical, bichromatic, time_reflected, time_reflected_bichromatic };

/// One pulse of a sequence. Its Rabi frequency carries the absolute phase
/// `phase_jump`, i.e. its propagator enters as Phi(-phase_jump) U Phi(phase_jump).
struct SequenceItem {
  PulseShape pulse;
  double phase_jump{0};

  bool operator==(const SequenceItem& other) const {
    return phase_jump == other.phase_jump && pulse == other.pulse;
  }
};

/// How a sequence was built.
struct SequenceDerivation {
  /// Pair arrangement, when built by build_pair or concatenation.
  std::optional<CaseLabel> pair_case;
  /// n for N = 2^n pulses; 0 for a bare pulse.
  int depth{0};
  /// Split phases from the innermost level outwards; the last entry is the
  /// user-controlled outer phase, all others are pi/2.
  std::vector<double> splits;

  bool operator==(const SequenceDerivation&) const = default;
};

/// Ordered pulses on contiguous, non-overlapping intervals.
class PulseSequence {
 public:
  PulseSequence(std::vector<SequenceItem> items, SequenceDerivation derivation);

  /// A single pulse with zero phase.
  static PulseSequence bare(const PulseShape& pulse);

  [[nodiscard]] const std::vector<SequenceItem>& items() const { return items_; }
  [[nodiscard]] std::size_t size() const { return items_.size(); }
  [[nodiscard]] const SequenceDerivation& derivation() const { return derivation_; }
  [[nodiscard]] int depth() const { return derivation_.depth; }
  /// Outermost split phase (0 for a bare pulse).
  [[nodiscard]] double outer_phase() const;

  bool operator==(const PulseSequence&) const = default;

 private:
  std::vector<SequenceItem> items_;
  SequenceDerivation derivation_;
};

}  // namespace twinpulse
