#include "twinpulse/pulse.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "twinpulse/errors.hpp"

namespace twinpulse {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Central-difference step for sampled pulses, as a fraction of the pulse duration.
constexpr double tabulated_rate_fraction = 1e-4;

struct SourceValues {
  double omega;
  double delta;
};

double source_duration(const PulseShape::Source& source) {
  return std::visit(overloaded{[](const CosSinSource& s) { return 0.5 * std::numbers::pi * s.T; },
                               [](const ConstantSource& s) { return s.duration; },
                               [](const std::shared_ptr<const TabulatedSource>& s) {
                                 return s->t.back() - s->t.front();
                               }},
                    source);
}

SourceValues source_values(const PulseShape::Source& source, double tau) {
  return std::visit(overloaded{[tau](const CosSinSource& s) {
                                 return SourceValues{s.omega0 * std::cos(tau / s.T), -s.delta0 * std::sin(tau / s.T)};
                               },
                               [](const ConstantSource& s) { return SourceValues{s.omega, s.delta}; },
                               [tau](const std::shared_ptr<const TabulatedSource>& s) {
                                 return SourceValues{s->omega_spline(tau), s->delta_spline(tau)};
                               }},
                    source);
}

SourceValues source_rates(const PulseShape::Source& source, double tau) {
  return std::visit(overloaded{[tau](const CosSinSource& s) {
                                 return SourceValues{-s.omega0 / s.T * std::sin(tau / s.T),
                                                     -s.delta0 / s.T * std::cos(tau / s.T)};
                               },
                               [](const ConstantSource&) { return SourceValues{0.0, 0.0}; },
                               [tau](const std::shared_ptr<const TabulatedSource>& s) {
                                 const double h = tabulated_rate_fraction * (s->t.back() - s->t.front());
                                 return SourceValues{
                                     (s->omega_spline(tau + h) - s->omega_spline(tau - h)) / (2.0 * h),
                                     (s->delta_spline(tau + h) - s->delta_spline(tau - h)) / (2.0 * h)};
                               }},
                    source);
}

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw UsageError(std::string(what) + " must be finite");
  }
}

}  // namespace

TabulatedSource::TabulatedSource(std::vector<double> times, std::vector<double> omegas, std::vector<double> deltas)
    : t(std::move(times)), omega(std::move(omegas)), delta(std::move(deltas)) {
  if (t.size() < 2 || omega.size() != t.size() || delta.size() != t.size()) {
    throw UsageError("tabulated pulse needs at least two samples with matching columns");
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    require_finite(t[i], "tabulated time");
    require_finite(omega[i], "tabulated omega");
    require_finite(delta[i], "tabulated delta");
    if (i > 0 && !(t[i] > t[i - 1])) {
      throw UsageError("tabulated times must be strictly increasing");
    }
  }
  omega_spline = ClampedSpline::with_estimated_slopes(t, omega);
  delta_spline = ClampedSpline::with_estimated_slopes(t, delta);
}

PulseShape::PulseShape(Source source, double t_start, bool reflected, bool flip_delta)
    : source_(std::move(source)), t_start_(t_start), reflected_(reflected), flip_delta_(flip_delta) {
  require_finite(t_start_, "pulse start time");
  if (!(duration() > 0.0)) {
    throw UsageError("pulse must satisfy t_start < t_end");
  }
}

double PulseShape::duration() const { return source_duration(source_); }

double PulseShape::source_start() const {
  return std::visit(overloaded{[](const CosSinSource& s) { return -0.5 * std::numbers::pi * s.T; },
                               [](const ConstantSource&) { return 0.0; },
                               [](const std::shared_ptr<const TabulatedSource>& s) { return s->t.front(); }},
                    source_);
}

double PulseShape::source_time(double t) const {
  const double offset = t - t_start_;
  return reflected_ ? source_start() + duration() - offset : source_start() + offset;
}

double PulseShape::omega(double t) const { return source_values(source_, source_time(t)).omega; }

double PulseShape::delta(double t) const {
  const double d = source_values(source_, source_time(t)).delta;
  return flip_delta_ ? -d : d;
}

double PulseShape::omega_rate(double t) const {
  const double r = source_rates(source_, source_time(t)).omega;
  return reflected_ ? -r : r;
}

double PulseShape::delta_rate(double t) const {
  double r = source_rates(source_, source_time(t)).delta;
  if (reflected_) r = -r;
  return flip_delta_ ? -r : r;
}

double PulseShape::lambda(double t) const { return std::hypot(omega(t), delta(t)); }

PulseKind PulseShape::source_kind() const {
  return std::visit(overloaded{[](const CosSinSource&) { return PulseKind::cos_sin; },
                               [](const ConstantSource&) { return PulseKind::constant; },
                               [](const std::shared_ptr<const TabulatedSource>&) { return PulseKind::tabulated; }},
                    source_);
}

PulseKind PulseShape::kind() const { return (reflected_ || flip_delta_) ? PulseKind::derived : source_kind(); }

PulseShape PulseShape::placed_at(double t_start) const { return {source_, t_start, reflected_, flip_delta_}; }

bool PulseShape::same_profile(const PulseShape& other) const {
  if (reflected_ != other.reflected_ || flip_delta_ != other.flip_delta_) return false;
  return std::visit(overloaded{[](const std::shared_ptr<const TabulatedSource>& l,
                                  const std::shared_ptr<const TabulatedSource>& r) { return l == r || *l == *r; },
                               []<class L, class R>(const L& l, const R& r) {
                                 if constexpr (std::is_same_v<L, R>) {
                                   return l == r;
                                 } else {
                                   return false;
                                 }
                               }},
                    source_, other.source_);
}

bool PulseShape::operator==(const PulseShape& other) const {
  return t_start_ == other.t_start_ && same_profile(other);
}

PulseShape cos_sin_pulse(double amplitude, double T) { return cos_sin_pulse(amplitude, amplitude, T); }

PulseShape cos_sin_pulse(double omega0, double delta0, double T) {
  require_finite(omega0, "Cos-Sin amplitude");
  require_finite(delta0, "Cos-Sin amplitude");
  require_finite(T, "Cos-Sin duration");
  if (!(omega0 > 0.0) || !(delta0 > 0.0)) {
    throw UsageError("Cos-Sin amplitude must be positive");
  }
  if (!(T > 0.0)) {
    throw UsageError("Cos-Sin duration T must be positive");
  }
  return {CosSinSource{omega0, delta0, T}, -0.5 * std::numbers::pi * T, false, false};
}

PulseShape constant_pulse(double omega, double delta, double duration, double t_start) {
  require_finite(omega, "constant omega");
  require_finite(delta, "constant delta");
  require_finite(duration, "constant duration");
  return {ConstantSource{omega, delta, duration}, t_start, false, false};
}

PulseShape tabulated_pulse(std::vector<double> t, std::vector<double> omega, std::vector<double> delta) {
  auto source = std::make_shared<const TabulatedSource>(std::move(t), std::move(omega), std::move(delta));
  const double start = source->t.front();
  return {std::move(source), start, false, false};
}

PulseShape load_pulse_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot open pulse file " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw UsageError("pulse file " + path.string() + " is empty");
  }
  std::vector<double> t, omega, delta;
  std::size_t columns = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream row(line);
    std::vector<double> values;
    std::string cell;
    while (std::getline(row, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw UsageError(path.string() + ":" + std::to_string(line_no) + ": not a number: '" + cell + "'");
      }
    }
    if (values.size() != 2 && values.size() != 3) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": expected 2 or 3 columns");
    }
    if (columns == 0) columns = values.size();
    if (values.size() != columns) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": inconsistent column count");
    }
    t.push_back(values[0]);
    omega.push_back(values[1]);
    delta.push_back(columns == 3 ? values[2] : 0.0);
  }
  return tabulated_pulse(std::move(t), std::move(omega), std::move(delta));
}

PulseShape derive_pulse(const PulseShape& base, PulseTransform transform) {
  const bool mirror = transform == PulseTransform::mirror || transform == PulseTransform::mirror_flip_delta;
  const bool flip = transform == PulseTransform::flip_delta || transform == PulseTransform::mirror_flip_delta;
  return {base.source(), base.t_end(), base.reflected() != mirror, base.flip_delta() != flip};
}

AdiabaticityReport adiabaticity(const PulseShape& pulse, std::size_t samples) {
  if (samples < 2) {
    throw UsageError("adiabaticity needs at least two samples");
  }
  AdiabaticityReport report;
  const double t0 = pulse.t_start();
  const double h = pulse.duration() / static_cast<double>(samples - 1);
  std::vector<double> lambdas(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = (i + 1 == samples) ? pulse.t_end() : t0 + h * static_cast<double>(i);
    const double om = pulse.omega(t);
    const double de = pulse.delta(t);
    const double lam = std::hypot(om, de);
    lambdas[i] = lam;
    if (lam == 0.0) {
      report.degenerate = true;
      report.min_ratio = 0.0;
      continue;
    }
    // Lambda / |dtheta/dt| with dtheta/dt = (Delta Omega' - Omega Delta') / Lambda^2
    const double turning = std::abs(de * pulse.omega_rate(t) - om * pulse.delta_rate(t));
    if (turning > 0.0 && !report.degenerate) {
      report.min_ratio = std::min(report.min_ratio, lam * lam * lam / turning);
    }
  }
  report.lambda_initial = lambdas.front();
  report.lambda_final = lambdas.back();

  // composite Simpson, trapezoid on the last panel when the panel count is odd
  const std::size_t panels = samples - 1;
  const std::size_t simpson_panels = panels - (panels % 2);
  double eta = 0.0;
  for (std::size_t i = 0; i < simpson_panels; i += 2) {
    eta += h / 3.0 * (lambdas[i] + 4.0 * lambdas[i + 1] + lambdas[i + 2]);
  }
  if (simpson_panels != panels) {
    eta += 0.5 * h * (lambdas[panels - 1] + lambdas[panels]);
  }
  report.eta = eta;
  return report;
}

}  // namespace twinpulse
