#include "twinpulse/sequence_json.hpp"

#include <cmath>
#include <fstream>

#include "twinpulse/errors.hpp"

namespace twinpulse {

namespace {

constexpr const char* format_tag = "twinpulse.sequence";
constexpr int format_version = 1;

template <typename T>
T required(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) {
    throw UsageError(std::string("sequence document is missing '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("sequence document field '") + key + "': " + e.what());
  }
}

}  // namespace

std::string to_string(CaseLabel label) {
  switch (label) {
    case CaseLabel::identical:
      return "identical";
    case CaseLabel::bichromatic:
      return "bichromatic";
    case CaseLabel::time_reflected:
      return "time_reflected";
    case CaseLabel::time_reflected_bichromatic:
      return "time_reflected_bichromatic";
  }
  throw UsageError("unknown case label");
}

std::string to_string(PulseKind kind) {
  switch (kind) {
    case PulseKind::cos_sin:
      return "cos_sin";
    case PulseKind::constant:
      return "constant";
    case PulseKind::tabulated:
      return "tabulated";
    case PulseKind::derived:
      return "derived";
  }
  throw UsageError("unknown pulse kind");
}

CaseLabel parse_case_label(const std::string& text) {
  if (text == "a" || text == "identical") return CaseLabel::identical;
  if (text == "b" || text == "bichromatic") return CaseLabel::bichromatic;
  if (text == "c" || text == "time_reflected") return CaseLabel::time_reflected;
  if (text == "d" || text == "time_reflected_bichromatic") return CaseLabel::time_reflected_bichromatic;
  throw UsageError("unknown case '" + text + "' (expected a, b, c or d)");
}

nlohmann::json pulse_to_json(const PulseShape& pulse) {
  nlohmann::json j;
  j["kind"] = to_string(pulse.source_kind());
  if (const auto* s = std::get_if<CosSinSource>(&pulse.source())) {
    j["parameters"] = {{"omega0", s->omega0}, {"delta0", s->delta0}, {"T", s->T}};
  } else if (const auto* c = std::get_if<ConstantSource>(&pulse.source())) {
    j["parameters"] = {{"omega", c->omega}, {"delta", c->delta}, {"duration", c->duration}};
  } else {
    const auto& table = std::get<std::shared_ptr<const TabulatedSource>>(pulse.source());
    j["parameters"] = {{"t", table->t}, {"omega", table->omega}, {"delta", table->delta}};
  }
  j["reflected"] = pulse.reflected();
  j["flip_delta"] = pulse.flip_delta();
  j["interval"] = {pulse.t_start(), pulse.t_end()};
  return j;
}

PulseShape pulse_from_json(const nlohmann::json& j) {
  const auto kind = required<std::string>(j, "kind");
  const auto params = required<nlohmann::json>(j, "parameters");
  const auto interval = required<std::vector<double>>(j, "interval");
  if (interval.size() != 2) {
    throw UsageError("pulse interval must have two entries");
  }
  PulseShape::Source source;
  if (kind == "cos_sin") {
    CosSinSource s{required<double>(params, "omega0"), required<double>(params, "delta0"),
                   required<double>(params, "T")};
    if (!(s.omega0 > 0) || !(s.delta0 > 0) || !(s.T > 0)) {
      throw UsageError("Cos-Sin parameters must be positive");
    }
    source = s;
  } else if (kind == "constant") {
    source = ConstantSource{required<double>(params, "omega"), required<double>(params, "delta"),
                            required<double>(params, "duration")};
  } else if (kind == "tabulated") {
    source = std::make_shared<const TabulatedSource>(required<std::vector<double>>(params, "t"),
                                                     required<std::vector<double>>(params, "omega"),
                                                     required<std::vector<double>>(params, "delta"));
  } else {
    throw UsageError("unknown pulse kind '" + kind + "'");
  }
  PulseShape pulse(std::move(source), interval[0], required<bool>(j, "reflected"), required<bool>(j, "flip_delta"));
  if (std::abs(pulse.t_end() - interval[1]) > 1e-9 * std::max(1.0, std::abs(interval[1]))) {
    throw UsageError("pulse interval end does not match the pulse duration");
  }
  return pulse;
}

nlohmann::json sequence_to_json(const PulseSequence& sequence) {
  nlohmann::json j;
  j["format"] = format_tag;
  j["version"] = format_version;
  const SequenceDerivation& d = sequence.derivation();
  j["derivation"] = {{"case", d.pair_case ? nlohmann::json(to_string(*d.pair_case)) : nlohmann::json(nullptr)},
                     {"depth", d.depth},
                     {"splits", d.splits}};
  nlohmann::json items = nlohmann::json::array();
  for (const SequenceItem& item : sequence.items()) {
    nlohmann::json record = pulse_to_json(item.pulse);
    record["phase_jump"] = item.phase_jump;
    items.push_back(std::move(record));
  }
  j["items"] = std::move(items);
  return j;
}

PulseSequence sequence_from_json(const nlohmann::json& j) {
  if (required<std::string>(j, "format") != format_tag) {
    throw UsageError("not a twinpulse sequence document");
  }
  if (required<int>(j, "version") != format_version) {
    throw UsageError("unsupported sequence document version");
  }
  const auto derivation_json = required<nlohmann::json>(j, "derivation");
  SequenceDerivation derivation;
  if (derivation_json.contains("case") && !derivation_json.at("case").is_null()) {
    derivation.pair_case = parse_case_label(derivation_json.at("case").get<std::string>());
  }
  derivation.depth = required<int>(derivation_json, "depth");
  derivation.splits = required<std::vector<double>>(derivation_json, "splits");

  std::vector<SequenceItem> items;
  for (const nlohmann::json& record : required<nlohmann::json>(j, "items")) {
    items.push_back({pulse_from_json(record), required<double>(record, "phase_jump")});
  }
  return {std::move(items), std::move(derivation)};
}

PulseSequence load_sequence(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot open sequence file " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
  return sequence_from_json(j);
}

void save_sequence(const PulseSequence& sequence, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw UsageError("cannot write sequence file " + path.string());
  }
  out << sequence_to_json(sequence).dump(2) << '\n';
}

}  // namespace twinpulse
