#pragma once

#include <span>
#include <vector>

namespace twinpulse {

/// Cubic spline through (x_i, y_i) with prescribed end slopes.
class ClampedSpline {
 public:
  ClampedSpline() = default;

  /// x strictly increasing, at least two knots.
  ClampedSpline(std::span<const double> x, std::span<const double> y, double slope_start, double slope_end);

  /// End slopes estimated from the samples by one-sided differences.
  static ClampedSpline with_estimated_slopes(std::span<const double> x, std::span<const double> y);

  [[nodiscard]] double operator()(double t) const;
  [[nodiscard]] double derivative(double t) const;

 private:
  [[nodiscard]] std::size_t interval(double t) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> second_;  // second derivative at each knot
};

}  // namespace twinpulse
