#pragma once

// Closed-form coefficient presets built from low lattice harmonics.

#include "homog/problem.hpp"

#include <cstdint>

namespace homog {

/// d = 1, n = m = 1, b(D) = D, g = mean + amp cos(2 pi y).
PeriodicProblem preset_harmonic_1d(double mean = 2.0, double amp = 1.0);

/// Gradient operator b(D) = D (x) 1_n with constant g, f = 1 and lambda.
PeriodicProblem preset_constant(int d, const Mat& g, double lambda = 0.0, Index n = 1);

/// d = 1, n = m = 1 with oscillating g and, optionally, lower order terms and a weight f.
PeriodicProblem preset_oscillatory_1d(bool lower_order, bool weight, double lambda = 0.0);

struct RandomPresetOptions {
  int d = 2;
  Index n = 1;
  int harmonics = 3;
  double amplitude = 0.4;  // total harmonic amplitude relative to the mean
  bool lower_order = false;
  bool weight = false;
  double lambda = 0.0;
  std::uint64_t seed = 1;
};

/// Gradient-type operator (m = d n) with random smooth Hermitian g and,
/// optionally, random smooth a_j, Q and f.
PeriodicProblem preset_random_smooth(const RandomPresetOptions& opt);

/// d = 2, n = 1, m = 2, g = diag(2 + cos 2 pi y2, 2 + sin 2 pi y1): the columns
/// of g are divergence free. Constant a_j = (a1, a2).
PeriodicProblem preset_divergence_free(cplx a1 = 0.0, cplx a2 = 0.0, double lambda = 0.0);

/// Gradient blocks b_j = e_j (x) 1_n.
std::vector<Mat> gradient_symbol(int d, Index n);

}  // namespace homog
