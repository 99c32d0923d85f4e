#pragma once

// Threshold approximation of fiber exponentials:
//   f e^{-B(k,eps) s} f^* ~ f0 e^{-B0(k,eps) s} f0 P^ + K(k, eps, s)
// with B0 = f0 L^ f0 and P^ the projection onto constants.

#include "homog/ng.hpp"

namespace homog {

/// Everything derived from one problem at one truncation. Immutable once built.
struct FiberModel {
  FiberContext ctx;
  CellSolution cell;
  NGCoefficients ng;
  FiberConstants constants;
};

FiberModel build_fiber_model(const PeriodicProblem& problem, int N, const CellOptions& opt = {}, int grid_factor = 4);

/// Mode coefficient columns of the homogenized flow on constants:
/// (Lambda_G b(k) + eps LambdaT_G) f0 e^{-B0 s} f0, dim x n.
Mat corrector_column(const FiberModel& fm, const RVec& k, double eps, double s);

/// f0 [integral_0^s e^{-B0 (s-u)} f0 N f0 e^{-B0 u} du] f0, n x n.
Mat corrector_integral(const FiberModel& fm, const RVec& k, double eps, double s);

/// Full corrector K(k, eps, s) on the truncated space. Throws NonPositiveEffective
/// if B0(k, eps) is not positive definite for (k, eps) != 0.
Mat fiber_corrector(const FiberModel& fm, const RVec& k, double eps, double s);

/// f e^{-B s} f^* (M e^{-B s} M with a weight).
Mat fiber_exponential(const FiberModel& fm, const RVec& k, double eps, double s);
/// f0 e^{-B0 s} f0 on the constants, zero elsewhere.
Mat fiber_principal(const FiberModel& fm, const RVec& k, double eps, double s);

struct FiberRemainder {
  double remainder = 0.0;
  double principal_error = 0.0;  // without the corrector
  double envelope_pos = 0.0;     // s^{-1} e^{-c (|k|^2 + eps^2) s / 2}
  double envelope_nonneg = 0.0;  // (1 + s)^{-1} e^{-c (|k|^2 + eps^2) s / 2}
  double ratio_pos = 0.0;
  double ratio_nonneg = 0.0;
  bool in_regime = true;  // (|k|^2 + eps^2)^{1/2} <= tau0
};

/// `rate` is the lower constant used in the envelopes.
FiberRemainder fiber_remainder(const FiberModel& fm, const RVec& k, double eps, double s, double rate);

struct CrossValidation {
  double err_Z = 0, err_Zt = 0, err_ZG = 0, err_germ = 0, err_L = 0, err_N = 0;
  double tolerance = 0;
  bool passed() const;
};

/// Runs the abstract engine on the hatted family at direction theta and compares
/// with the cell-problem formulas at k = t theta. Relative Frobenius errors
/// (measured against at least 1e-6). Throws MismatchBeyondTolerance naming
/// the first offending object when `throw_on_mismatch`.
CrossValidation cross_validate_abstract(const FiberModel& fm, const RVec& theta, double t, double eps,
                                        double tol = 1e-7, bool throw_on_mismatch = true);

}  // namespace homog
