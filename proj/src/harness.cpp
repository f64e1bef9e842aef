#include "twinpulse/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

#include "twinpulse/analytic.hpp"
#include "twinpulse/errors.hpp"
#include "twinpulse/sequence_builder.hpp"
#include "twinpulse/sequence_json.hpp"

namespace twinpulse {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t numerical_trial_cap = 20;

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string variable_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::area:
      return "area";
    case SweepVariable::phase:
      return "phase";
    case SweepVariable::depth:
      return "depth";
  }
  throw UsageError("unknown sweep variable");
}

SweepVariable parse_variable(const std::string& name) {
  if (name == "area") return SweepVariable::area;
  if (name == "phase") return SweepVariable::phase;
  if (name == "depth") return SweepVariable::depth;
  throw UsageError("unknown sweep variable '" + name + "' (expected area, phase or depth)");
}

bool is_integer(double x) { return std::isfinite(x) && std::floor(x) == x; }

void write_provenance(std::ostream& out, const Provenance& provenance) {
  out << "# twinpulse " << TWINPULSE_VERSION << '\n';
  out << "# config_hash=" << provenance.config_hash << '\n';
  out << "# seed=" << provenance.seed << '\n';
}

SweepRow evaluate_point(const SweepSpec& spec, double value, const IntegratorConfig& integrator) {
  SweepRow row;
  row.param = value;
  double area = spec.area;
  double phi = spec.phi;
  int depth = spec.depth;
  switch (spec.variable) {
    case SweepVariable::area:
      area = value;
      break;
    case SweepVariable::phase:
      phi = value;
      break;
    case SweepVariable::depth:
      depth = static_cast<int>(value);
      row.param = std::ldexp(1.0, depth);
      break;
  }
  try {
    const PulseSequence sequence = sweep_sequence(spec, area, phi, depth);
    const PolarForm<double> single = polar_decompose(analytic_propagator(sequence.items().front().pulse));
    row.alpha = single.alpha;
    row.beta = single.beta;
    row.p_analytic = evaluate(sequence, EvaluationMethod::analytic).probability;
    row.p_numerical = evaluate(sequence, EvaluationMethod::numerical, integrator).probability;
    row.abs_diff = std::abs(row.p_analytic - row.p_numerical);
  } catch (const std::exception& e) {
    row.p_analytic = row.p_numerical = row.abs_diff = row.alpha = row.beta = nan;
    row.error = e.what();
  }
  return row;
}

// ---------------------------------------------------------------------------
// validation helpers

struct Tracker {
  InvariantResult result;

  Tracker(std::string name, double tolerance) {
    result.name = std::move(name);
    result.tolerance = tolerance;
  }

  void observe(double deviation) {
    ++result.samples;
    if (!(deviation <= result.max_deviation)) {
      result.max_deviation = std::isnan(deviation) ? std::numeric_limits<double>::infinity() : deviation;
    }
  }

  InvariantResult finish() {
    result.passed = result.samples > 0 && result.max_deviation <= result.tolerance;
    return result;
  }
};

Propagator random_propagator(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(-pi, pi);
  const double p = unit(rng);
  return {std::polar(std::sqrt(1.0 - p), angle(rng)), std::polar(std::sqrt(p), angle(rng))};
}

double distance(const Propagator& x, const Propagator& y) {
  return std::max(std::abs(x.a() - y.a()), std::abs(x.b() - y.b()));
}

}  // namespace

// ---------------------------------------------------------------------------
// SweepSpec

void SweepSpec::validate() const {
  if (!std::isfinite(start) || !std::isfinite(stop)) {
    throw UsageError("sweep bounds must be finite");
  }
  if (variable == SweepVariable::depth) {
    if (!is_integer(start) || !is_integer(stop) || start < 0 || stop > 20 || start > stop) {
      throw UsageError("depth sweeps need integer bounds 0 <= from <= to <= 20");
    }
  } else {
    if (points < 2) {
      throw UsageError("sweeps need at least two points");
    }
    if (!(start < stop)) {
      throw UsageError("sweep start must be below stop");
    }
  }
  if (variable == SweepVariable::area && start < 0) {
    throw UsageError("pulse area must be non-negative");
  }
  if (!(area >= 0) || !std::isfinite(phi)) {
    throw UsageError("fixed area must be non-negative and phi finite");
  }
  if (depth < 0 || depth > 20) {
    throw UsageError("depth must lie in [0, 20]");
  }
  const int max_depth = variable == SweepVariable::depth ? static_cast<int>(stop) : depth;
  if (max_depth >= 2 && pair_case != CaseLabel::time_reflected_bichromatic) {
    throw UsageError("sequences deeper than a pair are only defined for case d");
  }
  if (amplitude && !(*amplitude > 0)) {
    throw UsageError("amplitude must be positive");
  }
}

std::vector<double> SweepSpec::grid() const {
  std::vector<double> values;
  if (variable == SweepVariable::depth) {
    for (double n = start; n <= stop; n += 1.0) values.push_back(n);
    return values;
  }
  values.reserve(points);
  const double step = (stop - start) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    values.push_back(i + 1 == points ? stop : start + step * static_cast<double>(i));
  }
  return values;
}

nlohmann::json SweepSpec::to_json() const {
  nlohmann::json j{{"var", variable_name(variable)},
                   {"from", start},
                   {"to", stop},
                   {"points", points},
                   {"area", area},
                   {"phi", phi},
                   {"depth", depth},
                   {"case", to_string(pair_case)}};
  j["amplitude"] = amplitude ? nlohmann::json(*amplitude) : nlohmann::json(nullptr);
  return j;
}

SweepSpec SweepSpec::from_json(const nlohmann::json& j, SweepSpec spec) {
  try {
    if (j.contains("var")) spec.variable = parse_variable(j.at("var").get<std::string>());
    if (j.contains("from")) spec.start = j.at("from").get<double>();
    if (j.contains("to")) spec.stop = j.at("to").get<double>();
    if (j.contains("points")) spec.points = j.at("points").get<std::size_t>();
    if (j.contains("area")) spec.area = j.at("area").get<double>();
    if (j.contains("phi")) spec.phi = j.at("phi").get<double>();
    if (j.contains("depth")) spec.depth = j.at("depth").get<int>();
    if (j.contains("case")) spec.pair_case = parse_case_label(j.at("case").get<std::string>());
    if (j.contains("amplitude")) {
      spec.amplitude = j.at("amplitude").is_null() ? std::nullopt : std::optional(j.at("amplitude").get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad sweep config: ") + e.what());
  }
  return spec;
}

SweepSpec SweepSpec::from_json(const nlohmann::json& j) { return from_json(j, SweepSpec{}); }

SweepSpec sweep_preset(const std::string& name) {
  SweepSpec spec;
  if (name == "fig-area-scan") {
    spec.variable = SweepVariable::area;
    spec.start = 0.0;
    spec.stop = 6.0 * pi;
    spec.points = 600;
    spec.phi = pi / 2;
    spec.depth = 1;
  } else if (name == "fig-depth-scan") {
    spec.variable = SweepVariable::depth;
    spec.start = 0.0;
    spec.stop = 3.0;
    spec.area = 2.0;
    spec.phi = pi / 2;
  } else {
    throw UsageError("unknown preset '" + name + "' (expected fig-area-scan or fig-depth-scan)");
  }
  return spec;
}

std::size_t SweepResult::failures() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) {
    return !r.error.empty();
  }));
}

PulseSequence sweep_sequence(const SweepSpec& spec, double area, double phi, int depth) {
  const double lambda = spec.amplitude.value_or(area);
  // A zero-area point is the field-free interval of the unit-T pulse.
  const PulseShape pulse =
      area == 0.0 ? constant_pulse(0.0, 0.0, 0.5 * pi, -0.5 * pi) : cos_sin_pulse(lambda, area / lambda);
  if (depth == 0) return PulseSequence::bare(pulse);
  if (depth == 1) return build_pair(pulse, spec.pair_case, phi);
  if (spec.pair_case != CaseLabel::time_reflected_bichromatic) {
    throw UsageError("sequences deeper than a pair are only defined for case d");
  }
  return build_concatenated(pulse, depth, phi);
}

SweepResult run_sweep(const SweepSpec& spec, const RunOptions& options) {
  spec.validate();
  options.integrator.validate();
  const std::vector<double> grid = spec.grid();
  SweepResult result;
  result.rows.resize(grid.size());

  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      result.rows[i] = evaluate_point(spec, grid[i], options.integrator);
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(grid.size(), 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return result;
}

std::string config_hash(const nlohmann::json& config) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : config.dump()) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result, const Provenance& provenance) {
  write_provenance(out, provenance);
  out << "param,P_analytic,P_numerical,abs_diff,alpha,beta\n";
  for (const SweepRow& row : result.rows) {
    out << format_number(row.param) << ',' << format_number(row.p_analytic) << ',' << format_number(row.p_numerical)
        << ',' << format_number(row.abs_diff) << ',' << format_number(row.alpha) << ',' << format_number(row.beta)
        << '\n';
  }
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    if (!result.rows[i].error.empty()) {
      out << "# point " << i << " param=" << format_number(result.rows[i].param)
          << " failed: " << result.rows[i].error << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// error table

std::vector<ErrorTableRow> run_error_table(std::span<const double> epsilons, std::span<const std::uint64_t> pulses) {
  struct Quote {
    double epsilon;
    std::uint64_t pulses;
    double value;
  };
  // relative errors quoted for the concatenated sequences
  static constexpr Quote quotes[] = {
      {0.05, 2, 1e-2}, {0.05, 4, 1e-4}, {0.05, 8, 1e-6}, {0.01, 2, 4e-4}, {0.01, 4, 1.6e-7}};

  std::vector<ErrorTableRow> rows;
  for (const double eps : epsilons) {
    if (!(eps > 0.0 && eps < 0.5)) {
      throw UsageError("epsilon must lie in (0, 0.5)");
    }
    for (const std::uint64_t n : pulses) {
      ErrorTableRow row;
      row.epsilon = eps;
      row.pulses = n;
      row.relative_error = std::abs(2.0 * concat_P(0.5 - eps, n) - 1.0);
      for (const Quote& q : quotes) {
        if (q.epsilon == eps && q.pulses == n) {
          row.quoted = q.value;
          row.quoted_disagrees = std::abs(row.relative_error - q.value) > 1e-9 * q.value;
        }
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_error_table_csv(std::ostream& out, std::span<const ErrorTableRow> rows, const Provenance& provenance) {
  write_provenance(out, provenance);
  out << "epsilon,N,relative_error,quoted,note\n";
  for (const ErrorTableRow& row : rows) {
    out << format_number(row.epsilon) << ',' << row.pulses << ',' << format_number(row.relative_error) << ',';
    if (row.quoted) out << format_number(*row.quoted);
    out << ',';
    if (row.quoted && row.quoted_disagrees) {
      out << "quoted value disagrees with (2 epsilon)^N; suspected typo";
    } else if (row.quoted) {
      out << "matches quoted value";
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// validation suite

bool ValidationReport::passed() const {
  return !invariants.empty() &&
         std::all_of(invariants.begin(), invariants.end(), [](const InvariantResult& r) { return r.passed; });
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const InvariantResult& r : invariants) {
    list.push_back({{"name", r.name},
                    {"passed", r.passed},
                    {"max_deviation", r.max_deviation},
                    {"tolerance", r.tolerance},
                    {"samples", r.samples}});
  }
  return {{"seed", seed}, {"trials", trials}, {"passed", passed()}, {"invariants", list}};
}

PulseShape random_tabulated_pulse(std::uint64_t seed, std::size_t samples) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::uniform_real_distribution<double> length(1.0, 3.0);
  std::uniform_real_distribution<double> offset(0.5, 2.0);
  const double duration = length(rng);
  double om[4], de[4];
  for (int k = 0; k < 4; ++k) {
    om[k] = coeff(rng) / (1.0 + k);
    de[k] = coeff(rng) / (1.0 + k);
  }
  const double om0 = offset(rng);
  const double de0 = coeff(rng);
  std::vector<double> t(samples), omega(samples), delta(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(samples - 1);
    t[i] = -duration + duration * x;
    omega[i] = om0;
    delta[i] = de0;
    for (int k = 0; k < 4; ++k) {
      omega[i] += 2.0 * om[k] * std::cos((k + 1) * pi * x);
      delta[i] += 2.0 * de[k] * std::sin((k + 1) * pi * x + k);
    }
  }
  return tabulated_pulse(std::move(t), std::move(omega), std::move(delta));
}

ValidationReport run_validate(std::uint64_t seed, std::size_t trials, const IntegratorConfig& integrator) {
  if (trials < 1) {
    throw UsageError("validate needs at least one trial");
  }
  integrator.validate();
  ValidationReport report;
  report.seed = seed;
  report.trials = trials;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(-pi, pi);
  const std::size_t numerical_trials = std::min(trials, numerical_trial_cap);

  {
    Tracker unitarity("unitarity_preserved", 1e-12);
    Tracker assoc("compose_associative", 1e-12);
    Tracker phases("phase_sandwich_additive", 1e-12);
    for (std::size_t i = 0; i < trials; ++i) {
      const Propagator x = random_propagator(rng), y = random_propagator(rng), z = random_propagator(rng);
      const double f1 = angle(rng), f2 = angle(rng);
      for (const Propagator& u :
           {compose(x, y), phase_sandwich(x, f1), sigma_conjugate(x, PauliAxis::x), sigma_conjugate(x, PauliAxis::y),
            sigma_conjugate(x, PauliAxis::z), time_reversal_variant(x, TimeReversal::sym_sym),
            time_reversal_variant(x, TimeReversal::anti_anti), time_reversal_variant(x, TimeReversal::sym_anti),
            time_reversal_variant(x, TimeReversal::anti_sym)}) {
        unitarity.observe(u.norm_drift());
      }
      assoc.observe(distance(compose(compose(x, y), z), compose(x, compose(y, z))));
      phases.observe(distance(phase_sandwich(x, f1 + f2), phase_sandwich(phase_sandwich(x, f1), f2)));
    }
    report.invariants.push_back(unitarity.finish());
    report.invariants.push_back(assoc.finish());
    report.invariants.push_back(phases.finish());
  }

  {
    Tracker table("pair_closed_forms_match_composition", 1e-12);
    Tracker independence("case_d_independent_of_stueckelberg_phases", 1e-12);
    for (std::size_t i = 0; i < trials; ++i) {
      const Propagator u = random_propagator(rng);
      const PolarForm<double> polar = polar_decompose(u);
      const double phi = angle(rng);
      const Propagator second[] = {u, sigma_conjugate(u, PauliAxis::x), u.transpose(), mirror_bar(u)};
      const CaseLabel labels[] = {CaseLabel::identical, CaseLabel::bichromatic, CaseLabel::time_reflected,
                                  CaseLabel::time_reflected_bichromatic};
      for (int c = 0; c < 4; ++c) {
        const Propagator total = compose(phase_sandwich(second[c], phi), u);
        table.observe(std::abs(total.probability() - pair_probability(labels[c], polar.p, polar.alpha, polar.beta, phi)));
      }
      // same p and phi, fresh Stueckelberg phases
      const Propagator shuffled{std::polar(std::sqrt(1.0 - polar.p), angle(rng)), std::polar(std::sqrt(polar.p), angle(rng))};
      const double p_original = compose(phase_sandwich(mirror_bar(u), phi), u).probability();
      const double p_shuffled = compose(phase_sandwich(mirror_bar(shuffled), phi), shuffled).probability();
      independence.observe(std::abs(p_original - p_shuffled));
    }
    report.invariants.push_back(table.finish());
    report.invariants.push_back(independence.finish());
  }

  {
    Tracker adiabatic("adiabatic_probability_matches_bloch_map", 1e-12);
    Tracker orthogonal("adiabatic_map_orthogonal", 1e-12);
    std::uniform_real_distribution<double> field(-2.0, 2.0);
    for (std::size_t i = 0; i < trials; ++i) {
      AdiabaticBoundary<double> b{field(rng), field(rng), field(rng), field(rng), 10.0 * unit(rng)};
      if (b.lambda_i() < 1e-3 || b.lambda_f() < 1e-3) continue;
      const BlochVector<double> final_state = adiabatic_bloch(b, BlochVector<double>(0, 0, -1));
      adiabatic.observe(std::abs(single_pulse_probability(b) - 0.5 * (final_state(2) + 1.0)));
      const Matrix3<double> m = adiabatic_rotation(b);
      orthogonal.observe((m * m.transpose() - Matrix3<double>::Identity()).cwiseAbs().maxCoeff());
    }
    report.invariants.push_back(adiabatic.finish());
    report.invariants.push_back(orthogonal.finish());
  }

  {
    Tracker identity("concatenate_equals_mirror_phase_product", 1e-12);
    Tracker scaling("concatenated_probability_matches_closed_form", 1e-10);
    std::uniform_int_distribution<int> depth_draw(0, 4);
    for (std::size_t i = 0; i < trials; ++i) {
      const double area = 0.05 + 4.0 * pi * unit(rng);
      const double phi = angle(rng);
      const int depth = depth_draw(rng);
      const PulseShape pulse = cos_sin_pulse(area, 1.0);
      const PulseSequence base = build_concatenated(pulse, depth, pi / 2);
      const Propagator u_base = evaluate(base, EvaluationMethod::analytic).propagator;
      const Propagator doubled = evaluate(concatenate(base, phi), EvaluationMethod::analytic).propagator;
      const Propagator expected = PhaseGate<double>{-phi} * (mirror_bar(u_base) * (PhaseGate<double>{phi} * u_base));
      identity.observe(distance(doubled, expected));
      const PulseSequence half_split = build_concatenated(pulse, depth + 1, pi / 2);
      scaling.observe(std::abs(evaluate(half_split, EvaluationMethod::analytic).probability -
                               concat_P(cos_sin_single_p(area), std::uint64_t{1} << (depth + 1))));
    }
    report.invariants.push_back(identity.finish());
    report.invariants.push_back(scaling.finish());
  }

  {
    Tracker exact("integrator_matches_exact_cos_sin", 1e-7);
    Tracker pair("integrator_matches_case_d_closed_form", 1e-7);
    Tracker flip("detuning_flip_is_sigma_x_conjugation", 1e-8);
    Tracker mirror_even("mirror_even_even_is_transpose", 1e-7);
    Tracker mirror_odd("mirror_even_odd_is_sigma_z_adjoint", 1e-7);
    for (std::size_t i = 0; i < numerical_trials; ++i) {
      const double area = 0.05 + 10.0 * pi * unit(rng);
      const double phi = angle(rng);
      const PulseShape pulse = cos_sin_pulse(area, 1.0);
      const Propagator numeric = propagate(pulse, integrator);
      exact.observe(distance(numeric, cos_sin_exact(area)));
      const double p_pair =
          evaluate(build_pair(pulse, CaseLabel::time_reflected_bichromatic, phi), EvaluationMethod::numerical, integrator)
              .probability;
      pair.observe(std::abs(p_pair - cos_sin_pair_P(area, phi)));
      flip.observe(
          distance(propagate(derive_pulse(pulse, PulseTransform::flip_delta), integrator), sigma_conjugate(numeric, PauliAxis::x)));

      const PulseShape table = random_tabulated_pulse(rng());
      const Propagator u_table = propagate(table, integrator);
      mirror_even.observe(distance(propagate(derive_pulse(table, PulseTransform::mirror), integrator),
                                   time_reversal_variant(u_table, TimeReversal::sym_sym)));
      mirror_odd.observe(distance(propagate(derive_pulse(table, PulseTransform::mirror_flip_delta), integrator),
                                  time_reversal_variant(u_table, TimeReversal::sym_anti)));
    }
    for (Tracker* t : {&exact, &pair, &flip, &mirror_even, &mirror_odd}) {
      report.invariants.push_back(t->finish());
    }
  }
  return report;
}

}  // namespace twinpulse
