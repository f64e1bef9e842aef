#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "twinpulse/integrator.hpp"
#include "twinpulse/pulse_sequence.hpp"

namespace twinpulse {

enum class SweepVariable { area, phase, depth };

/// A one-dimensional scan. The variables not being swept take the fixed values below.
struct SweepSpec {
  SweepVariable variable{SweepVariable::area};
  double start{0};
  double stop{1};
  std::size_t points{2};
  /// Cos-Sin pulse area A = Lambda T.
  double area{1};
  double phi{0};
  /// n for N = 2^n pulses; 0 scans a single pulse.
  int depth{1};
  CaseLabel pair_case{CaseLabel::time_reflected_bichromatic};
  /// Lambda; when unset T = 1 and Lambda = A.
  std::optional<double> amplitude;

  /// Throws UsageError when the spec cannot be run.
  void validate() const;
  /// Grid of parameter values; for depth sweeps the integers start..stop.
  [[nodiscard]] std::vector<double> grid() const;

  [[nodiscard]] nlohmann::json to_json() const;
  /// Missing keys keep the values already in `defaults`.
  static SweepSpec from_json(const nlohmann::json& j, SweepSpec defaults);
  static SweepSpec from_json(const nlohmann::json& j);
};

/// Named figure presets: "fig-area-scan", "fig-depth-scan".
SweepSpec sweep_preset(const std::string& name);

struct SweepRow {
  double param{0};
  double p_analytic{0};
  double p_numerical{0};
  double abs_diff{0};
  double alpha{0};
  double beta{0};
  /// Empty unless this grid point failed.
  std::string error;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  [[nodiscard]] std::size_t failures() const;
};

struct RunOptions {
  IntegratorConfig integrator;
  std::size_t workers{1};
};

/// The sequence evaluated at one sweep point.
PulseSequence sweep_sequence(const SweepSpec& spec, double area, double phi, int depth);

/// Evaluates every grid point analytically and numerically; rows come back in grid order.
SweepResult run_sweep(const SweepSpec& spec, const RunOptions& options = {});

struct Provenance {
  std::string config_hash;
  std::uint64_t seed{0};
};

/// FNV-1a 64 of the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

/// `#` provenance header, then `param,P_analytic,P_numerical,abs_diff,alpha,beta`, 17 significant digits.
void write_sweep_csv(std::ostream& out, const SweepResult& result, const Provenance& provenance);

struct ErrorTableRow {
  double epsilon{0};
  std::uint64_t pulses{1};
  /// |2 P_N - 1| for single-pulse probability 1/2 - epsilon, i.e. (2 epsilon)^N.
  double relative_error{0};
  /// Value quoted in the literature for this cell, when there is one.
  std::optional<double> quoted;
  /// Quoted value differs from the computed one by more than rounding of the quote.
  bool quoted_disagrees{false};
};

std::vector<ErrorTableRow> run_error_table(std::span<const double> epsilons, std::span<const std::uint64_t> pulses);

void write_error_table_csv(std::ostream& out, std::span<const ErrorTableRow> rows, const Provenance& provenance);

struct InvariantResult {
  std::string name;
  bool passed{false};
  double max_deviation{0};
  double tolerance{0};
  std::size_t samples{0};
};

struct ValidationReport {
  std::uint64_t seed{0};
  std::size_t trials{0};
  std::vector<InvariantResult> invariants;

  [[nodiscard]] bool passed() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Cross-module invariant suite. Numerically integrated checks use min(trials, 20) draws.
ValidationReport run_validate(std::uint64_t seed, std::size_t trials, const IntegratorConfig& integrator = {});

/// Smooth random tabulated pulse on [-duration, 0], derived from `seed`.
PulseShape random_tabulated_pulse(std::uint64_t seed, std::size_t samples = 201);

}  // namespace twinpulse
