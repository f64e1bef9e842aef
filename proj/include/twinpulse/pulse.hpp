#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "twinpulse/spline.hpp"

namespace twinpulse {

/// Omega(t) = omega0 cos(t/T), Delta(t) = -delta0 sin(t/T) on t in [-pi T/2, 0].
struct CosSinSource {
  double omega0{1};
  double delta0{1};
  double T{1};

  [[nodiscard]] bool equal_amplitudes() const { return omega0 == delta0; }
  /// A = Lambda T; only meaningful for equal amplitudes.
  [[nodiscard]] double area() const { return omega0 * T; }
  bool operator==(const CosSinSource&) const = default;
};

/// Constant Omega and Delta over [0, duration].
struct ConstantSource {
  double omega{0};
  double delta{0};
  double duration{1};
  bool operator==(const ConstantSource&) const = default;
};

/// Sampled Omega(t), Delta(t), interpolated by clamped cubic splines.
struct TabulatedSource {
  std::vector<double> t;
  std::vector<double> omega;
  std::vector<double> delta;
  ClampedSpline omega_spline;
  ClampedSpline delta_spline;

  TabulatedSource(std::vector<double> times, std::vector<double> omegas, std::vector<double> deltas);
  bool operator==(const TabulatedSource& other) const {
    return t == other.t && omega == other.omega && delta == other.delta;
  }
};

enum class PulseKind { cos_sin, constant, tabulated, derived };

/// Second-pulse arrangements relative to the first pulse.
enum class PulseTransform { same, flip_delta, mirror, mirror_flip_delta };

/**
 * A pulse Omega(t), Delta(t) on [t_start, t_end].
 *
 * Every pulse is a source profile placed on the time axis, optionally
 * time-reflected and with the detuning sign flipped. Derived pulses share the
 * source, so repeated derivations collapse to a single (reflected, flip) pair.
 */
class PulseShape {
 public:
  using Source = std::variant<CosSinSource, ConstantSource, std::shared_ptr<const TabulatedSource>>;

  PulseShape(Source source, double t_start, bool reflected, bool flip_delta);

  [[nodiscard]] double omega(double t) const;
  [[nodiscard]] double delta(double t) const;
  [[nodiscard]] double omega_rate(double t) const;
  [[nodiscard]] double delta_rate(double t) const;
  [[nodiscard]] double lambda(double t) const;

  [[nodiscard]] double t_start() const { return t_start_; }
  [[nodiscard]] double t_end() const { return t_start_ + duration(); }
  [[nodiscard]] double duration() const;

  [[nodiscard]] PulseKind kind() const;
  [[nodiscard]] PulseKind source_kind() const;
  [[nodiscard]] const Source& source() const { return source_; }
  [[nodiscard]] bool reflected() const { return reflected_; }
  [[nodiscard]] bool flip_delta() const { return flip_delta_; }

  /// Same pulse moved to start at `t_start`.
  [[nodiscard]] PulseShape placed_at(double t_start) const;

  /// Pulses with equal source and orientation; placement is ignored.
  [[nodiscard]] bool same_profile(const PulseShape& other) const;

  bool operator==(const PulseShape& other) const;

 private:
  [[nodiscard]] double source_start() const;
  [[nodiscard]] double source_time(double t) const;

  Source source_;
  double t_start_;
  bool reflected_;
  bool flip_delta_;
};

/// Equal-amplitude Cos-Sin pulse with Lambda = amplitude.
PulseShape cos_sin_pulse(double amplitude, double T);

/// Cos-Sin pulse with independent Rabi and detuning amplitudes.
PulseShape cos_sin_pulse(double omega0, double delta0, double T);

PulseShape constant_pulse(double omega, double delta, double duration, double t_start = 0.0);

PulseShape tabulated_pulse(std::vector<double> t, std::vector<double> omega, std::vector<double> delta);

/// Reads `t,omega,delta` (or `t,omega` with zero detuning) with a header row.
PulseShape load_pulse_csv(const std::filesystem::path& path);

/// Second pulse of a pair, placed directly after `base` on [t_end, t_end + duration].
PulseShape derive_pulse(const PulseShape& base, PulseTransform transform);

struct AdiabaticityReport {
  /// min over the grid of Lambda / |dtheta/dt|; +inf when the mixing angle is static.
  double min_ratio{std::numeric_limits<double>::infinity()};
  /// integral of Lambda dt.
  double eta{0};
  double lambda_initial{0};
  double lambda_final{0};
  /// Lambda vanished somewhere on the grid (min_ratio forced to 0).
  bool degenerate{false};
};

inline constexpr std::size_t default_diagnostic_samples = 10000;

AdiabaticityReport adiabaticity(const PulseShape& pulse, std::size_t samples = default_diagnostic_samples);

}  // namespace twinpulse
