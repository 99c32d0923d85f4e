#include "homog/rate.hpp"

#include "homog/errors.hpp"

#include <algorithm>
#include <cmath>

namespace homog {

RateFit fit_rate(const std::vector<std::pair<double, double>>& series, double floor) {
  if (series.size() < 3)
    throw Error(ErrorCode::InsufficientDecades, "rate fit needs at least three points");
  for (std::size_t i = 1; i < series.size(); ++i)
    if (!(series[i].first < series[i - 1].first))
      throw Error(ErrorCode::InvalidInput, "rate fit needs strictly decreasing step sizes");

  RateFit fit;
  for (const auto& [h, e] : series) {
    if (!(h > 0.0)) throw Error(ErrorCode::InvalidInput, "step size must be positive");
    if (!(e > floor)) {
      fit.exact_agreement = true;
      return fit;
    }
  }
  const double m = static_cast<double>(series.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [h, e] : series) {
    const double x = std::log(h), y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double intercept = (sy - fit.slope * sx) / m;
  fit.constant = std::exp(intercept);
  for (const auto& [h, e] : series) {
    const double r = std::log(e) - (fit.slope * std::log(h) + intercept);
    fit.residuals.push_back(r);
    fit.residual_max = std::max(fit.residual_max, std::abs(r));
  }
  return fit;
}

}  // namespace homog
