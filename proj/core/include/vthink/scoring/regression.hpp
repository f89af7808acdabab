#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace vthink::scoring {

struct Point {
  double x = 0;
  double y = 0;
};

struct BandPoint {
  double x = 0;
  double fit = 0;
  double lower = 0;
  double upper = 0;
};

struct RegressionFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  double p_value = 1;       // two-sided slope t-test, n-2 degrees of freedom
  double slope_stderr = 0;
  double t_statistic = 0;
  std::size_t n = 0;
  double level = 0.95;
  std::vector<BandPoint> ci_band;  // confidence band of the mean prediction

  [[nodiscard]] double predict(double x) const { return intercept + slope * x; }
  [[nodiscard]] BandPoint band_at(double x) const;

  // Needed by band_at.
  double x_mean = 0;
  double sxx = 0;
  double residual_se = 0;
  double t_critical = 0;
};

/// Ordinary least squares y = intercept + slope * x. The band is evaluated at
/// each distinct x of the input. Throws ScoringError(TooFewPoints) for n < 3
/// and ScoringError(DegenerateX) when every x is equal. When y has no
/// variance, R² is reported as 0 and p as 1. p is clamped to
/// [DBL_MIN, 1] so an exact fit still yields a positive p-value.
RegressionFit ols_fit(std::span<const Point> points, double level = 0.95);

nlohmann::json fit_to_json(const RegressionFit& fit);

}  // namespace vthink::scoring
