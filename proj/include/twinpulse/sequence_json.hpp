#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "twinpulse/pulse_sequence.hpp"

namespace twinpulse {

std::string to_string(CaseLabel label);
std::string to_string(PulseKind kind);
/// Accepts full names and the single letters a-d.
CaseLabel parse_case_label(const std::string& text);

nlohmann::json pulse_to_json(const PulseShape& pulse);
PulseShape pulse_from_json(const nlohmann::json& j);

/**
 * Sequence document:
 *
 *   { "format": "twinpulse.sequence", "version": 1,
 *     "derivation": { "case": <label or null>, "depth": n, "splits": [..] },
 *     "items": [ { "kind", "parameters", "reflected", "flip_delta",
 *                  "interval": [t0, t1], "phase_jump" }, .. ] }
 */
nlohmann::json sequence_to_json(const PulseSequence& sequence);
PulseSequence sequence_from_json(const nlohmann::json& j);

PulseSequence load_sequence(const std::filesystem::path& path);
void save_sequence(const PulseSequence& sequence, const std::filesystem::path& path);

}  // namespace twinpulse
