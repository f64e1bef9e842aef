// twinpulse command-line front end.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "twinpulse/analytic.hpp"
#include "twinpulse/errors.hpp"
#include "twinpulse/harness.hpp"
#include "twinpulse/sequence_builder.hpp"
#include "twinpulse/sequence_json.hpp"

namespace tp = twinpulse;
using nlohmann::json;

namespace {

enum ExitCode : int { ok = 0, usage = 1, validation_failed = 2, numerical_failed = 3 };

struct Common {
  std::string config;
  std::string out;
  std::uint64_t seed{0};
  std::size_t workers{1};
  std::size_t steps{20000};
  double tolerance{0};
};

struct SweepFlags {
  std::string preset;
  std::string var{"area"};
  double from{0}, to{1}, phi{0}, area{1}, amplitude{0};
  std::size_t points{2};
  int depth{1};
  std::string pair_case{"d"};
};

struct PropagateFlags {
  std::string sequence;
  std::string pulse_csv;
  std::string save;
  double area{1}, phi{0};
  std::string pair_case{"d"};
  int depth{0};
};

json read_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw tp::UsageError("cannot open config '" + path + "'");
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw tp::UsageError("config must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw tp::UsageError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

bool given(const CLI::App& app, const std::string& flag) { return app.count(flag) > 0; }

// Config values fill in whatever the command line left unset.
template <typename T>
void merge(const json& config, const char* key, const CLI::App& app, const std::string& flag, T& target) {
  if (!given(app, flag) && config.contains(key)) {
    try {
      target = config.at(key).get<T>();
    } catch (const json::exception& e) {
      throw tp::UsageError(std::string("config key '") + key + "': " + e.what());
    }
  }
}

void merge_common(const json& config, const CLI::App& app, Common& c) {
  merge(config, "out", app, "--out", c.out);
  merge(config, "seed", app, "--seed", c.seed);
  merge(config, "workers", app, "--workers", c.workers);
  merge(config, "steps", app, "--steps", c.steps);
  merge(config, "tolerance", app, "--tolerance", c.tolerance);
}

tp::IntegratorConfig integrator_of(const Common& c) {
  tp::IntegratorConfig cfg;
  cfg.step_count = c.steps;
  if (c.tolerance > 0) cfg.tolerance = c.tolerance;
  cfg.validate();
  return cfg;
}

json integrator_json(const Common& c) {
  json j{{"steps", c.steps}};
  if (c.tolerance > 0) j["tolerance"] = c.tolerance;
  return j;
}

void add_common(CLI::App& app, Common& c) {
  app.add_option("--config", c.config, "JSON run config; flags override its values");
  app.add_option("--out", c.out, "Output file (default stdout)");
  app.add_option("--seed", c.seed, "Random seed");
  app.add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--steps", c.steps, "RK4 steps per pulse");
  app.add_option("--tolerance", c.tolerance, "Adaptive Dormand-Prince tolerance (0 = fixed-step RK4)");
}

template <typename Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw tp::UsageError("cannot write '" + path + "'");
  write(out);
}

json complex_json(const std::complex<double>& z) { return json::array({z.real(), z.imag()}); }

json propagator_json(const tp::Propagator& u) {
  const tp::PolarForm<double> polar = tp::polar_decompose(u);
  const tp::BlochVector<double> bloch = tp::to_bloch(u);
  return {{"a", complex_json(u.a())},
          {"b", complex_json(u.b())},
          {"p", u.probability()},
          {"alpha", polar.alpha},
          {"beta", polar.beta},
          {"bloch", json::array({bloch(0), bloch(1), bloch(2)})}};
}

int run_sweep_command(const CLI::App& app, Common& common, SweepFlags& f) {
  const json config = read_config(common.config);
  merge_common(config, app, common);

  tp::SweepSpec spec;
  std::string preset = f.preset;
  merge(config, "preset", app, "--preset", preset);
  if (!preset.empty()) spec = tp::sweep_preset(preset);
  spec = tp::SweepSpec::from_json(config, spec);

  if (given(app, "--var")) spec.variable = tp::SweepSpec::from_json(json{{"var", f.var}}).variable;
  if (given(app, "--from")) spec.start = f.from;
  if (given(app, "--to")) spec.stop = f.to;
  if (given(app, "--points")) spec.points = f.points;
  if (given(app, "--phi")) spec.phi = f.phi;
  if (given(app, "--area")) spec.area = f.area;
  if (given(app, "--depth")) spec.depth = f.depth;
  if (given(app, "--case")) spec.pair_case = tp::parse_case_label(f.pair_case);
  if (given(app, "--amplitude")) spec.amplitude = f.amplitude;
  spec.validate();

  tp::RunOptions options{integrator_of(common), common.workers};
  json effective = spec.to_json();
  effective["integrator"] = integrator_json(common);
  effective["seed"] = common.seed;

  const tp::SweepResult result = tp::run_sweep(spec, options);
  const tp::Provenance provenance{tp::config_hash(effective), common.seed};
  emit(common.out, [&](std::ostream& out) { tp::write_sweep_csv(out, result, provenance); });
  if (result.failures() > 0) {
    std::cerr << result.failures() << " sweep point(s) failed\n";
    return numerical_failed;
  }
  return ok;
}

int run_error_table_command(const CLI::App& app, Common& common, std::vector<double>& eps,
                            std::vector<std::uint64_t>& pulses) {
  const json config = read_config(common.config);
  merge_common(config, app, common);
  merge(config, "epsilons", app, "--eps", eps);
  merge(config, "pulses", app, "--pulses", pulses);
  const std::vector<tp::ErrorTableRow> rows = tp::run_error_table(eps, pulses);
  const json effective{{"epsilons", eps}, {"pulses", pulses}, {"seed", common.seed}};
  const tp::Provenance provenance{tp::config_hash(effective), common.seed};
  emit(common.out, [&](std::ostream& out) { tp::write_error_table_csv(out, rows, provenance); });
  return ok;
}

int run_validate_command(const CLI::App& app, Common& common, std::size_t& trials) {
  const json config = read_config(common.config);
  merge_common(config, app, common);
  merge(config, "trials", app, "--trials", trials);
  const tp::ValidationReport report = tp::run_validate(common.seed, trials, integrator_of(common));
  emit(common.out, [&](std::ostream& out) { out << report.to_json().dump(2) << '\n'; });
  return report.passed() ? ok : validation_failed;
}

int run_exact_command(const CLI::App& app, Common& common, double& area, double& phi, int& depth) {
  const json config = read_config(common.config);
  merge_common(config, app, common);
  merge(config, "area", app, "--area", area);
  merge(config, "phi", app, "--phi", phi);
  merge(config, "depth", app, "--depth", depth);
  if (depth < 0 || depth > 20) throw tp::UsageError("depth must lie in [0, 20]");
  const std::uint64_t pulses = std::uint64_t{1} << depth;
  json j{{"area", area},
         {"propagator", propagator_json(tp::cos_sin_exact(area))},
         {"single_p", tp::cos_sin_single_p(area)},
         {"phi", phi},
         {"pair_P", tp::cos_sin_pair_P(area, phi)},
         {"pulses", pulses},
         {"concat_P", tp::cos_sin_concat_P(area, pulses)}};
  emit(common.out, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  return ok;
}

int run_propagate_command(const CLI::App& app, Common& common, PropagateFlags& f) {
  const json config = read_config(common.config);
  merge_common(config, app, common);
  merge(config, "sequence", app, "--sequence", f.sequence);
  merge(config, "pulse_csv", app, "--pulse-csv", f.pulse_csv);
  merge(config, "area", app, "--area", f.area);
  merge(config, "phi", app, "--phi", f.phi);
  merge(config, "case", app, "--case", f.pair_case);
  merge(config, "depth", app, "--depth", f.depth);
  if (!f.sequence.empty() && !f.pulse_csv.empty()) {
    throw tp::UsageError("--sequence and --pulse-csv are mutually exclusive");
  }

  const std::optional<tp::PulseSequence> sequence = [&]() -> std::optional<tp::PulseSequence> {
    if (!f.sequence.empty()) return tp::load_sequence(f.sequence);
    const tp::PulseShape first =
        f.pulse_csv.empty() ? tp::cos_sin_pulse(f.area, 1.0) : tp::load_pulse_csv(f.pulse_csv);
    if (f.depth < 0) throw tp::UsageError("depth must be non-negative");
    if (f.depth == 0) return tp::PulseSequence::bare(first);
    const tp::CaseLabel label = tp::parse_case_label(f.pair_case);
    if (f.depth == 1) return tp::build_pair(first, label, f.phi);
    if (label != tp::CaseLabel::time_reflected_bichromatic) {
      throw tp::UsageError("sequences deeper than a pair are only defined for case d");
    }
    return tp::build_concatenated(first, f.depth, f.phi);
  }();
  if (!f.save.empty()) tp::save_sequence(*sequence, f.save);

  const tp::SequenceEvaluation numerical =
      tp::evaluate(*sequence, tp::EvaluationMethod::numerical, integrator_of(common));
  json j{{"pulses", sequence->size()}, {"depth", sequence->depth()}, {"numerical", propagator_json(numerical.propagator)}};
  try {
    const tp::SequenceEvaluation analytic = tp::evaluate(*sequence, tp::EvaluationMethod::analytic);
    j["analytic"] = propagator_json(analytic.propagator);
    j["abs_diff"] = std::abs(analytic.probability - numerical.probability);
  } catch (const tp::UnsupportedError&) {
    j["analytic"] = nullptr;
  }
  emit(common.out, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-pulse and concatenated-sequence propagation toolkit"};
  app.set_version_flag("--version", std::string(TWINPULSE_VERSION));
  app.require_subcommand(1);

  Common common;
  SweepFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Scan area, phase or depth; CSV output");
  add_common(*sweep, common);
  sweep->add_option("--preset", sweep_flags.preset, "fig-area-scan or fig-depth-scan");
  sweep->add_option("--var", sweep_flags.var, "Swept variable")->check(CLI::IsMember({"area", "phase", "depth"}));
  sweep->add_option("--from", sweep_flags.from, "Start value (depth: exponent n)");
  sweep->add_option("--to", sweep_flags.to, "Stop value (depth: exponent n)");
  sweep->add_option("--points", sweep_flags.points, "Grid points");
  sweep->add_option("--case", sweep_flags.pair_case, "Pair arrangement a, b, c or d");
  sweep->add_option("--phi", sweep_flags.phi, "Phase jump in radians");
  sweep->add_option("--area", sweep_flags.area, "Cos-Sin pulse area");
  sweep->add_option("--depth", sweep_flags.depth, "n for N = 2^n pulses");
  sweep->add_option("--amplitude", sweep_flags.amplitude, "Fixed Lambda; T follows from the area");

  std::vector<double> eps{0.05, 0.01};
  std::vector<std::uint64_t> pulses{2, 4, 8};
  auto* error_table = app.add_subcommand("error-table", "Relative error (2 epsilon)^N of concatenated sequences");
  add_common(*error_table, common);
  error_table->add_option("--eps", eps, "Single-pulse errors epsilon");
  error_table->add_option("--pulses", pulses, "Pulse counts N (powers of two)");

  std::size_t trials = 1000;
  auto* validate = app.add_subcommand("validate", "Run the invariant suite; JSON report");
  add_common(*validate, common);
  validate->add_option("--trials", trials, "Random draws per invariant");

  double exact_area = 1, exact_phi = std::numbers::pi / 2;
  int exact_depth = 1;
  auto* exact = app.add_subcommand("exact", "Closed-form Cos-Sin results; JSON output");
  add_common(*exact, common);
  exact->add_option("--area", exact_area, "Pulse area");
  exact->add_option("--phi", exact_phi, "Phase jump of the case-d pair");
  exact->add_option("--depth", exact_depth, "n for the concatenated probability");

  PropagateFlags prop;
  auto* propagate = app.add_subcommand("propagate", "Integrate a sequence numerically; JSON output");
  add_common(*propagate, common);
  propagate->add_option("--sequence", prop.sequence, "Sequence JSON document");
  propagate->add_option("--pulse-csv", prop.pulse_csv, "Tabulated pulse t,omega[,delta]");
  propagate->add_option("--save-sequence", prop.save, "Write the evaluated sequence as JSON");
  propagate->add_option("--area", prop.area, "Cos-Sin pulse area (when no file is given)");
  propagate->add_option("--phi", prop.phi, "Phase jump");
  propagate->add_option("--case", prop.pair_case, "Pair arrangement a, b, c or d");
  propagate->add_option("--depth", prop.depth, "0 bare pulse, 1 pair, n >= 2 concatenated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (*sweep) return run_sweep_command(*sweep, common, sweep_flags);
    if (*error_table) return run_error_table_command(*error_table, common, eps, pulses);
    if (*validate) return run_validate_command(*validate, common, trials);
    if (*exact) return run_exact_command(*exact, common, exact_area, exact_phi, exact_depth);
    if (*propagate) return run_propagate_command(*propagate, common, prop);
  } catch (const tp::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const tp::UnsupportedError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const std::runtime_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return numerical_failed;
  }
  return usage;
}
