#pragma once

#include <cstddef>
#include <vector>

namespace jgreedy {

/// Least-squares line through (log x, log y).
struct SlopeFit {
  std::vector<double> xs;
  std::vector<double> ys;
  double slope = 0.0;
  double intercept = 0.0;     // natural-log intercept
  double max_residual = 0.0;  // max |log y - (intercept + slope log x)|
  bool dropped_first = false; // smallest grid point excluded from the fit
  double dropped_x = 0.0;

  double predict(double x) const;
};

/// Plain least-squares fit on the log-log samples. Throws ConfigError for fewer than two
/// points or non-positive data.
SlopeFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys);

/// Fit that drops the smallest grid point once when the residual exceeds 2 * tolerance.
/// The omission is recorded in the result.
SlopeFit fit_loglog_trimmed(const std::vector<double>& xs, const std::vector<double>& ys,
                            double tolerance);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_relative_residual = 0.0;  // max |y - fit| / |y|
};

/// Ordinary least squares y = intercept + slope * t.
LinearFit fit_linear(const std::vector<double>& ts, const std::vector<double>& ys);

}  // namespace jgreedy
