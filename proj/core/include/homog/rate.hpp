#pragma once

#include <utility>
#include <vector>

namespace homog {

struct RateFit {
  double slope = 0.0;
  double constant = 0.0;
  double residual_max = 0.0;
  std::vector<double> residuals;
  /// Some error sat at or below the floor; no fit was attempted.
  bool exact_agreement = false;
};

/// Least-squares fit of log(error) = slope * log(h) + log(constant).
/// Needs at least three points with strictly decreasing h (InsufficientDecades
/// otherwise). Errors at or below `floor` flag exact agreement instead.
RateFit fit_rate(const std::vector<std::pair<double, double>>& series, double floor = 0.0);

}  // namespace homog
