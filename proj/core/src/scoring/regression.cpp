#include "vthink/scoring/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "vthink/scoring/aggregate.hpp"
#include "vthink/scoring/stats.hpp"

namespace vthink::scoring {

BandPoint RegressionFit::band_at(double x) const {
  const double fit = predict(x);
  const double se = residual_se * std::sqrt(1.0 / static_cast<double>(n) + (x - x_mean) * (x - x_mean) / sxx);
  const double half = t_critical * se;
  return {x, fit, fit - half, fit + half};
}

RegressionFit ols_fit(std::span<const Point> points, double level) {
  const std::size_t n = points.size();
  if (n < 3) {
    throw ScoringError(ScoringErrc::TooFewPoints,
                       fmt::format("TooFewPoints: regression needs at least 3 points, got {}", n));
  }
  if (std::all_of(points.begin(), points.end(), [&](const Point& p) { return p.x == points[0].x; })) {
    throw ScoringError(ScoringErrc::DegenerateX, "DegenerateX: every x value is identical");
  }

  const double nd = static_cast<double>(n);
  double x_mean = 0;
  double y_mean = 0;
  for (const auto& p : points) {
    x_mean += p.x;
    y_mean += p.y;
  }
  x_mean /= nd;
  y_mean /= nd;

  double sxx = 0;
  double sxy = 0;
  double syy = 0;
  for (const auto& p : points) {
    const double dx = p.x - x_mean;
    const double dy = p.y - y_mean;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }

  RegressionFit fit;
  fit.n = n;
  fit.level = level;
  fit.x_mean = x_mean;
  fit.sxx = sxx;
  fit.slope = sxy / sxx;
  fit.intercept = y_mean - fit.slope * x_mean;

  double ss_res = 0;
  for (const auto& p : points) {
    const double r = p.y - fit.predict(p.x);
    ss_res += r * r;
  }

  const double df = nd - 2.0;
  fit.residual_se = std::sqrt(ss_res / df);
  fit.slope_stderr = fit.residual_se / std::sqrt(sxx);
  fit.t_critical = stats::student_t_quantile(0.5 + level / 2.0, df);

  if (syy > 0) {
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    if (fit.slope_stderr > 0) {
      fit.t_statistic = fit.slope / fit.slope_stderr;
      fit.p_value = stats::student_t_two_sided_p(fit.t_statistic, df);
    } else {
      fit.t_statistic = std::copysign(std::numeric_limits<double>::infinity(), fit.slope);
      fit.p_value = 0.0;
    }
  } else {
    fit.r_squared = 0.0;
    fit.t_statistic = 0.0;
    fit.p_value = 1.0;
  }
  fit.p_value = std::clamp(fit.p_value, std::numeric_limits<double>::min(), 1.0);

  std::vector<double> xs;
  xs.reserve(n);
  for (const auto& p : points) xs.push_back(p.x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (double x : xs) fit.ci_band.push_back(fit.band_at(x));
  return fit;
}

nlohmann::json fit_to_json(const RegressionFit& fit) {
  nlohmann::json band = nlohmann::json::array();
  for (const auto& b : fit.ci_band) {
    band.push_back({{"x", b.x}, {"fit", b.fit}, {"lower", b.lower}, {"upper", b.upper}});
  }
  return {{"slope", fit.slope},
          {"intercept", fit.intercept},
          {"r_squared", fit.r_squared},
          {"p_value", fit.p_value},
          {"slope_stderr", fit.slope_stderr},
          {"t_statistic", std::isfinite(fit.t_statistic) ? nlohmann::json(fit.t_statistic)
                                                         : nlohmann::json(nullptr)},
          {"n", fit.n},
          {"level", fit.level},
          {"ci_band", band}};
}

}  // namespace vthink::scoring
