#include "twinpulse/sequence_builder.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "twinpulse/analytic.hpp"
#include "twinpulse/errors.hpp"

namespace twinpulse {

namespace {

constexpr double half_pi = std::numbers::pi / 2;
constexpr double phase_tolerance = 1e-12;
constexpr double contiguity_tolerance = 1e-12;

PulseShape mirrored_flipped(const PulseShape& pulse, double t_start) {
  return {pulse.source(), t_start, !pulse.reflected(), !pulse.flip_delta()};
}

bool mirror_structured(std::span<const SequenceItem> items, int depth, std::span<const double> splits) {
  if (depth == 0) {
    return items.size() == 1;
  }
  if (items.size() != (std::size_t{1} << depth) || splits.size() != static_cast<std::size_t>(depth)) {
    return false;
  }
  const std::size_t half = items.size() / 2;
  const double outer = splits.back();
  for (std::size_t k = 0; k < half; ++k) {
    const SequenceItem& early = items[k];
    const SequenceItem& late = items[items.size() - 1 - k];
    if (!late.pulse.same_profile(mirrored_flipped(early.pulse, 0.0))) return false;
    if (std::abs(late.phase_jump - (early.phase_jump + outer)) > phase_tolerance) return false;
  }
  // inner levels split at pi/2
  if (depth > 1 && std::abs(splits[splits.size() - 2] - half_pi) > phase_tolerance) return false;
  return mirror_structured(items.first(half), depth - 1, splits.first(splits.size() - 1));
}

std::vector<std::string> tokenize(std::string_view word) {
  std::vector<std::string> tokens;
  std::istringstream in{std::string(word)};
  for (std::string token; in >> token;) tokens.push_back(token);
  return tokens;
}

std::vector<std::string> bar_word(const std::vector<std::string>& word) {
  std::vector<std::string> out(word.rbegin(), word.rend());
  for (std::string& token : out) {
    if (token == "U") {
      token = "Ub";
    } else if (token == "Ub") {
      token = "U";
    } else if (token == "P") {
      token = "Ps";
    } else if (token == "Ps") {
      token = "P";
    } else {
      throw UsageError("cannot mirror operator token '" + token + "'");
    }
  }
  return out;
}

}  // namespace

PulseSequence::PulseSequence(std::vector<SequenceItem> items, SequenceDerivation derivation)
    : items_(std::move(items)), derivation_(std::move(derivation)) {
  if (items_.empty()) {
    throw UsageError("pulse sequence must contain at least one pulse");
  }
  for (std::size_t k = 0; k < items_.size(); ++k) {
    if (!std::isfinite(items_[k].phase_jump)) {
      throw UsageError("phase jump must be finite");
    }
    if (k > 0) {
      const double gap = items_[k].pulse.t_start() - items_[k - 1].pulse.t_end();
      const double scale = std::max(1.0, std::abs(items_[k].pulse.t_start()));
      if (std::abs(gap) > contiguity_tolerance * scale) {
        throw UsageError("pulse intervals must be contiguous and non-overlapping");
      }
    }
  }
}

PulseSequence PulseSequence::bare(const PulseShape& pulse) { return {{SequenceItem{pulse, 0.0}}, {}}; }

double PulseSequence::outer_phase() const { return derivation_.splits.empty() ? 0.0 : derivation_.splits.back(); }

PulseTransform transform_for(CaseLabel label) {
  switch (label) {
    case CaseLabel::identical:
      return PulseTransform::same;
    case CaseLabel::bichromatic:
      return PulseTransform::flip_delta;
    case CaseLabel::time_reflected:
      return PulseTransform::mirror;
    case CaseLabel::time_reflected_bichromatic:
      return PulseTransform::mirror_flip_delta;
  }
  throw UsageError("unknown case label");
}

PulseSequence build_pair(const PulseShape& first, CaseLabel label, double phi) {
  PulseShape second = derive_pulse(first, transform_for(label));
  return {{SequenceItem{first, 0.0}, SequenceItem{std::move(second), phi}}, SequenceDerivation{label, 1, {phi}}};
}

PulseSequence mirror_sequence(const PulseSequence& sequence, double t_start) {
  std::vector<SequenceItem> items;
  items.reserve(sequence.size());
  double t = t_start;
  for (auto it = sequence.items().rbegin(); it != sequence.items().rend(); ++it) {
    PulseShape pulse = mirrored_flipped(it->pulse, t);
    t = pulse.t_end();
    items.push_back({std::move(pulse), it->phase_jump});
  }
  return {std::move(items), sequence.derivation()};
}

bool has_mirror_structure(const PulseSequence& sequence) {
  const SequenceDerivation& d = sequence.derivation();
  if (d.depth == 0) {
    return sequence.size() == 1;
  }
  if (d.pair_case != CaseLabel::time_reflected_bichromatic) return false;
  return mirror_structured(sequence.items(), d.depth, d.splits);
}

PulseSequence with_outer_phase(const PulseSequence& sequence, double phi) {
  if (sequence.depth() == 0) {
    return sequence;
  }
  const double shift = phi - sequence.outer_phase();
  std::vector<SequenceItem> items = sequence.items();
  for (std::size_t k = items.size() / 2; k < items.size(); ++k) {
    items[k].phase_jump += shift;
  }
  SequenceDerivation derivation = sequence.derivation();
  derivation.splits.back() = phi;
  return {std::move(items), std::move(derivation)};
}

PulseSequence concatenate(const PulseSequence& base, double phi) {
  if (!has_mirror_structure(base)) {
    throw UsageError("concatenate needs a bare pulse or a mirrored, detuning-flipped pair sequence");
  }
  const PulseSequence inner = with_outer_phase(base, half_pi);
  const PulseSequence image = mirror_sequence(inner, inner.items().back().pulse.t_end());

  std::vector<SequenceItem> items = inner.items();
  items.reserve(2 * inner.size());
  for (const SequenceItem& item : image.items()) {
    items.push_back({item.pulse, item.phase_jump + phi});
  }
  SequenceDerivation derivation;
  derivation.pair_case = CaseLabel::time_reflected_bichromatic;
  derivation.depth = inner.depth() + 1;
  derivation.splits = inner.derivation().splits;
  derivation.splits.push_back(phi);
  return {std::move(items), std::move(derivation)};
}

PulseSequence build_concatenated(const PulseShape& first, int depth, double phi) {
  if (depth < 0 || depth > 20) {
    throw UsageError("concatenation depth must lie in [0, 20]");
  }
  PulseSequence sequence = PulseSequence::bare(first);
  for (int level = 0; level < depth; ++level) {
    sequence = concatenate(sequence, level + 1 == depth ? phi : half_pi);
  }
  return sequence;
}

Propagator analytic_propagator(const PulseShape& pulse) {
  Propagator u;
  if (const auto* cos_sin = std::get_if<CosSinSource>(&pulse.source())) {
    if (!cos_sin->equal_amplitudes()) {
      throw UnsupportedError("no closed form for Cos-Sin pulses with unequal amplitudes");
    }
    u = cos_sin_exact(cos_sin->area());
  } else if (const auto* constant = std::get_if<ConstantSource>(&pulse.source())) {
    u = constant_exact(constant->omega, constant->delta, constant->duration);
  } else {
    throw UnsupportedError("no closed form for tabulated pulses");
  }
  if (pulse.reflected()) u = u.transpose();
  if (pulse.flip_delta()) u = sigma_conjugate(u, PauliAxis::x);
  return u;
}

SequenceEvaluation evaluate(const PulseSequence& sequence, EvaluationMethod method,
                            const std::optional<IntegratorConfig>& cfg) {
  SequenceEvaluation out;
  out.method = method;
  if (method == EvaluationMethod::analytic) {
    for (const SequenceItem& item : sequence.items()) {
      out.propagator = compose(phase_sandwich(analytic_propagator(item.pulse), item.phase_jump), out.propagator);
    }
  } else {
    out.propagator = propagate_sequence(sequence, cfg.value_or(IntegratorConfig{}));
  }
  out.probability = out.propagator.probability();
  out.bloch = to_bloch(out.propagator);
  return out;
}

Propagator evaluate_operator_word(std::string_view word, const Propagator& base, double phi) {
  const Propagator bar = mirror_bar(base);
  const Propagator p = PhaseGate<double>{half_pi}.propagator();
  const Propagator ps = PhaseGate<double>{-half_pi}.propagator();
  const Propagator f = PhaseGate<double>{phi}.propagator();
  Propagator product;
  for (const std::string& token : tokenize(word)) {
    if (token == "U") {
      product = compose(product, base);
    } else if (token == "Ub") {
      product = compose(product, bar);
    } else if (token == "P") {
      product = compose(product, p);
    } else if (token == "Ps") {
      product = compose(product, ps);
    } else if (token == "F") {
      product = compose(product, f);
    } else {
      throw UsageError("unknown operator token '" + token + "'");
    }
  }
  return product;
}

std::string concatenated_operator_word(int depth) {
  if (depth < 0) {
    throw UsageError("depth must be non-negative");
  }
  std::vector<std::string> word{"U"};
  for (int level = 0; level < depth; ++level) {
    std::vector<std::string> next = bar_word(word);
    next.push_back(level + 1 == depth ? "F" : "P");
    next.insert(next.end(), word.begin(), word.end());
    word = std::move(next);
  }
  std::string out;
  for (const std::string& token : word) {
    if (!out.empty()) out += ' ';
    out += token;
  }
  return out;
}

}  // namespace twinpulse
