#pragma once

#include "homog/linalg.hpp"

#include <functional>

namespace homog {

struct QuadratureResult {
  Mat value;
  double error_estimate = 0.0;
  int evaluations = 0;
};

/// Adaptive Gauss-Kronrod (7/15) for matrix-valued integrands. Stops when the
/// summed Frobenius error estimate is below max(abs_tol, rel_tol * ||value||).
QuadratureResult integrate_adaptive(const std::function<Mat(double)>& f, double a, double b,
                                    double abs_tol = 1e-13, double rel_tol = 1e-12,
                                    int max_intervals = 2000);

}  // namespace homog
