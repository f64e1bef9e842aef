#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "twinpulse/analytic.hpp"
#include "twinpulse/errors.hpp"
#include "twinpulse/harness.hpp"

using namespace twinpulse;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::ContainsSubstring;

namespace {

constexpr double pi = std::numbers::pi;

SweepSpec area_sweep(std::size_t points) {
  SweepSpec spec;
  spec.variable = SweepVariable::area;
  spec.start = 0.0;
  spec.stop = 3.0 * pi;
  spec.points = points;
  spec.phi = pi / 2;
  return spec;
}

std::string csv_of(const SweepResult& result, std::uint64_t seed = 0) {
  std::ostringstream out;
  write_sweep_csv(out, result, {"0123456789abcdef", seed});
  return out.str();
}

}  // namespace

TEST_CASE("sweep spec validation", "[harness]") {
  CHECK_NOTHROW(area_sweep(2).validate());
  SweepSpec spec = area_sweep(1);
  CHECK_THROWS_AS(spec.validate(), UsageError);
  spec = area_sweep(5);
  spec.stop = spec.start;
  CHECK_THROWS_AS(spec.validate(), UsageError);
  spec = area_sweep(5);
  spec.start = -1.0;
  CHECK_THROWS_AS(spec.validate(), UsageError);
  spec = area_sweep(5);
  spec.depth = 2;
  spec.pair_case = CaseLabel::identical;
  CHECK_THROWS_AS(spec.validate(), UsageError);
  spec = area_sweep(5);
  spec.amplitude = -2.0;
  CHECK_THROWS_AS(spec.validate(), UsageError);
  spec = sweep_preset("fig-depth-scan");
  spec.stop = 2.5;
  CHECK_THROWS_AS(spec.validate(), UsageError);
  CHECK_THROWS_AS(run_sweep(area_sweep(1)), UsageError);
}

TEST_CASE("sweep grids", "[harness]") {
  const auto grid = area_sweep(4).grid();
  REQUIRE(grid.size() == 4);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 3.0 * pi);
  CHECK_THAT(grid[1], WithinAbs(pi, 1e-15));
  const auto depths = sweep_preset("fig-depth-scan").grid();
  CHECK(depths == std::vector<double>{0, 1, 2, 3});
}

TEST_CASE("presets", "[harness]") {
  const SweepSpec area = sweep_preset("fig-area-scan");
  CHECK(area.variable == SweepVariable::area);
  CHECK(area.points == 600);
  CHECK_THAT(area.stop, WithinAbs(6 * pi, 1e-15));
  CHECK(area.pair_case == CaseLabel::time_reflected_bichromatic);
  CHECK_THAT(area.phi, WithinAbs(pi / 2, 1e-15));
  const SweepSpec depth = sweep_preset("fig-depth-scan");
  CHECK(depth.variable == SweepVariable::depth);
  CHECK(depth.area == 2.0);
  CHECK_THROWS_AS(sweep_preset("fig-nothing"), UsageError);
}

TEST_CASE("sweep spec JSON merges over defaults", "[harness]") {
  const SweepSpec base = sweep_preset("fig-area-scan");
  const SweepSpec merged = SweepSpec::from_json(nlohmann::json{{"points", 7}, {"case", "b"}}, base);
  CHECK(merged.points == 7);
  CHECK(merged.pair_case == CaseLabel::bichromatic);
  CHECK(merged.stop == base.stop);
  const SweepSpec back = SweepSpec::from_json(merged.to_json());
  CHECK(back.to_json() == merged.to_json());
  CHECK_THROWS_AS(SweepSpec::from_json(nlohmann::json{{"var", "time"}}), UsageError);
  CHECK_THROWS_AS(SweepSpec::from_json(nlohmann::json{{"points", "many"}}), UsageError);
}

TEST_CASE("area sweep of the case-d pair", "[harness]") {
  const SweepResult result = run_sweep(area_sweep(13));
  REQUIRE(result.rows.size() == 13);
  CHECK(result.failures() == 0);
  for (const SweepRow& row : result.rows) {
    CHECK(row.abs_diff < 1e-6);
    CHECK_THAT(row.abs_diff, WithinAbs(std::abs(row.p_analytic - row.p_numerical), 1e-18));
    CHECK_THAT(row.p_analytic, WithinAbs(cos_sin_pair_P(row.param, pi / 2), 1e-12));
  }
  // zero area: no coupling at all
  CHECK(result.rows.front().p_analytic == 0.0);
  // Stueckelberg phases of the single pulse
  const PolarForm<double> polar = polar_decompose(cos_sin_exact(pi));
  CHECK_THAT(result.rows[4].alpha, WithinAbs(polar.alpha, 1e-12));
  CHECK_THAT(result.rows[4].beta, WithinAbs(polar.beta, 1e-12));
}

TEST_CASE("fixed amplitude changes T, not the sweep values", "[harness]") {
  SweepSpec spec = area_sweep(5);
  spec.start = 0.5;
  spec.amplitude = 3.0;
  const SweepResult result = run_sweep(spec);
  for (const SweepRow& row : result.rows) {
    CHECK_THAT(row.p_numerical, WithinAbs(cos_sin_pair_P(row.param, pi / 2), 1e-8));
  }
}

TEST_CASE("phase sweep at large area follows cos^2(phi/2)", "[harness]") {
  SweepSpec spec;
  spec.variable = SweepVariable::phase;
  spec.start = 0.0;
  spec.stop = 2 * pi;
  spec.points = 9;
  spec.area = 30.0;
  for (const SweepRow& row : run_sweep(spec).rows) {
    CHECK_THAT(row.p_analytic, WithinAbs(std::pow(std::cos(row.param / 2), 2), 1.0 / (30.0 * 30.0 + 1)));
  }
}

TEST_CASE("depth sweep errors scale as (1-2p)^N", "[harness]") {
  const SweepResult result = run_sweep(sweep_preset("fig-depth-scan"));
  REQUIRE(result.rows.size() == 4);
  const double p = cos_sin_single_p(2.0);
  for (const SweepRow& row : result.rows) {
    const double n = row.param;
    CHECK_THAT(std::abs(1 - 2 * row.p_analytic), WithinAbs(std::pow(std::abs(1 - 2 * p), n), 1e-12));
    CHECK(row.abs_diff < 1e-6);
  }
  CHECK(result.rows[3].param == 8.0);
}

TEST_CASE("sweep output is independent of the worker count", "[harness]") {
  const SweepSpec spec = area_sweep(11);
  const std::string serial = csv_of(run_sweep(spec, {{}, 1}));
  CHECK(csv_of(run_sweep(spec, {{}, 4})) == serial);
  CHECK(csv_of(run_sweep(spec, {{}, 64})) == serial);
  CHECK(csv_of(run_sweep(spec, {{}, 1})) == serial);
}

TEST_CASE("sweep CSV layout", "[harness]") {
  const std::string csv = csv_of(run_sweep(area_sweep(3)), 42);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK_THAT(line, ContainsSubstring("# twinpulse"));
  std::getline(in, line);
  CHECK(line == "# config_hash=0123456789abcdef");
  std::getline(in, line);
  CHECK(line == "# seed=42");
  std::getline(in, line);
  CHECK(line == "param,P_analytic,P_numerical,abs_diff,alpha,beta");
  std::getline(in, line);
  CHECK(line.rfind("0,0,0,0,", 0) == 0);
  std::getline(in, line);
  // 17 significant digits
  CHECK_THAT(line, ContainsSubstring("4.7123889803846897"));
}

TEST_CASE("failed sweep points are recorded, not fatal", "[harness]") {
  SweepSpec spec = area_sweep(3);
  RunOptions options;
  options.integrator.step_count = 10;
  spec.stop = 300.0;
  const SweepResult result = run_sweep(spec, options);
  REQUIRE(result.rows.size() == 3);
  CHECK(result.failures() >= 1);
  CHECK(result.rows.front().error.empty());
  CHECK(std::isnan(result.rows.back().p_numerical));
  CHECK_THAT(csv_of(result), ContainsSubstring("# point 2 "));
}

TEST_CASE("config hash", "[harness]") {
  const nlohmann::json j{{"a", 1}, {"b", "x"}};
  CHECK(config_hash(j).size() == 16);
  CHECK(config_hash(j) == config_hash(nlohmann::json::parse(R"({"b":"x","a":1})")));
  CHECK(config_hash(j) != config_hash(nlohmann::json{{"a", 2}, {"b", "x"}}));
}

TEST_CASE("error table", "[harness]") {
  const std::array<double, 2> eps{0.05, 0.01};
  const std::array<std::uint64_t, 3> pulses{2, 4, 8};
  const auto rows = run_error_table(eps, pulses);
  REQUIRE(rows.size() == 6);
  CHECK_THAT(rows[0].relative_error, WithinAbs(1e-2, 1e-15));
  CHECK_THAT(rows[3].relative_error, WithinAbs(4e-4, 1e-15));
  CHECK_THAT(rows[4].relative_error, WithinAbs(1.6e-7, 1e-15));
  CHECK_THAT(rows[2].relative_error, WithinAbs(1e-8, 1e-15));
  for (int i : {0, 1, 3, 4}) {
    REQUIRE(rows[i].quoted);
    CHECK(!rows[i].quoted_disagrees);
  }
  REQUIRE(rows[2].quoted);
  CHECK(*rows[2].quoted == 1e-6);
  CHECK(rows[2].quoted_disagrees);
  CHECK(!rows[5].quoted);

  std::ostringstream out;
  write_error_table_csv(out, rows, {"h", 0});
  CHECK_THAT(out.str(), ContainsSubstring("suspected typo"));

  const std::array<double, 1> bad_eps{0.5};
  CHECK_THROWS_AS(run_error_table(bad_eps, pulses), UsageError);
  const std::array<std::uint64_t, 1> bad_n{6};
  CHECK_THROWS_AS(run_error_table(eps, bad_n), UsageError);
}

TEST_CASE("validation suite", "[harness]") {
  const ValidationReport report = run_validate(5, 40);
  CHECK(report.passed());
  CHECK(report.invariants.size() >= 10);
  for (const InvariantResult& r : report.invariants) {
    INFO(r.name);
    CHECK(r.passed);
    CHECK(r.samples > 0);
    CHECK(r.max_deviation < 1e-7);
  }
  CHECK(run_validate(5, 40).to_json().dump() == report.to_json().dump());
  CHECK(run_validate(6, 40).to_json().dump() != report.to_json().dump());
  CHECK_THROWS_AS(run_validate(5, 0), UsageError);
}

TEST_CASE("random tabulated pulses are deterministic and smooth", "[harness]") {
  const PulseShape a = random_tabulated_pulse(17);
  const PulseShape b = random_tabulated_pulse(17);
  CHECK(a == b);
  CHECK(!(a == random_tabulated_pulse(18)));
  CHECK(a.t_end() == 0.0);
  CHECK(a.kind() == PulseKind::tabulated);
}
