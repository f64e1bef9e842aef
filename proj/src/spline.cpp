#include "twinpulse/spline.hpp"

#include <algorithm>

#include "twinpulse/errors.hpp"

namespace twinpulse {

namespace {

double one_sided_slope(double x0, double x1, double x2, double y0, double y1, double y2) {
  // derivative at x0 of the parabola through the three points
  const double h1 = x1 - x0;
  const double h2 = x2 - x0;
  return (y1 - y0) * h2 / (h1 * (h2 - h1)) - (y2 - y0) * h1 / (h2 * (h2 - h1));
}

}  // namespace

ClampedSpline::ClampedSpline(std::span<const double> x, std::span<const double> y, double slope_start,
                             double slope_end)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), second_(x.size(), 0.0) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) {
    throw UsageError("spline needs at least two knots and matching sample counts");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) {
      throw UsageError("spline knots must be strictly increasing");
    }
  }

  // Tridiagonal system for the knot second derivatives, solved by the Thomas algorithm.
  std::vector<double> diag(n), upper(n), rhs(n);
  const double h0 = x_[1] - x_[0];
  diag[0] = h0 / 3.0;
  upper[0] = h0 / 6.0;
  rhs[0] = (y_[1] - y_[0]) / h0 - slope_start;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = x_[i] - x_[i - 1];
    const double hr = x_[i + 1] - x_[i];
    diag[i] = (hl + hr) / 3.0;
    upper[i] = hr / 6.0;
    rhs[i] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
  }
  const double hn = x_[n - 1] - x_[n - 2];
  diag[n - 1] = hn / 3.0;
  rhs[n - 1] = slope_end - (y_[n - 1] - y_[n - 2]) / hn;

  // lower[i] (coupling i -> i-1) equals upper[i-1] by symmetry
  for (std::size_t i = 1; i < n; ++i) {
    const double m = upper[i - 1] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  second_[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    second_[i] = (rhs[i] - upper[i] * second_[i + 1]) / diag[i];
  }
}

ClampedSpline ClampedSpline::with_estimated_slopes(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 2 || y.size() != x.size()) {
    throw UsageError("spline needs at least two knots and matching sample counts");
  }
  const std::size_t n = x.size();
  if (n == 2) {
    const double slope = (y[1] - y[0]) / (x[1] - x[0]);
    return {x, y, slope, slope};
  }
  const double start = one_sided_slope(x[0], x[1], x[2], y[0], y[1], y[2]);
  const double end = one_sided_slope(x[n - 1], x[n - 2], x[n - 3], y[n - 1], y[n - 2], y[n - 3]);
  return {x, y, start, end};
}

std::size_t ClampedSpline::interval(double t) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - x_.begin() - 1, 0));
  return std::min(idx, x_.size() - 2);
}

double ClampedSpline::operator()(double t) const {
  const std::size_t i = interval(t);
  const double h = x_[i + 1] - x_[i];
  const double l = (x_[i + 1] - t) / h;
  const double r = (t - x_[i]) / h;
  return l * y_[i] + r * y_[i + 1] +
         ((l * l * l - l) * second_[i] + (r * r * r - r) * second_[i + 1]) * h * h / 6.0;
}

double ClampedSpline::derivative(double t) const {
  const std::size_t i = interval(t);
  const double h = x_[i + 1] - x_[i];
  const double l = (x_[i + 1] - t) / h;
  const double r = (t - x_[i]) / h;
  return (y_[i + 1] - y_[i]) / h +
         (-(3.0 * l * l - 1.0) * second_[i] + (3.0 * r * r - 1.0) * second_[i + 1]) * h / 6.0;
}

}  // namespace twinpulse
