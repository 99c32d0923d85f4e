#pragma once

// Bordered pencil B(t, eps) = M^* B^(t, eps) M, where the hatted family has
// Q0 = I. The sandwiched exponential M e^{-B s} M^* is approximated from the
// threshold data of the hatted family and G = (M M^*)^{-1}.

#include "homog/abstract.hpp"

namespace homog {

struct BorderedFamily {
  GramFamily base;  // hatted family, base.Q0 = I
  Mat M;
  Mat G;

  static BorderedFamily make(GramFamily hatted, Mat m);
  /// The family M^* B^ M with Q0 = M^* M.
  GramFamily unhatted() const;
};

struct BorderedThreshold {
  ThresholdData hat;  // threshold data of the hatted family
  Mat M0;             // (V^* G V)^{-1/2}, V = kernel basis of the hatted family
  Mat ZG, ZtG;        // corrected so that G ZG, G ZtG are orthogonal to the kernel
  NParts NG;

  const Mat& V() const { return hat.basis(); }
};

BorderedThreshold bordered_threshold(const BorderedFamily& bf, const ThresholdOptions& opt = {});

/// M0 e^{-M0 L^ M0 s} M0 P^ on the full space.
Mat bordered_principal(const BorderedFamily& bf, const BorderedThreshold& bt, double t, double eps,
                       double s);

Mat bordered_corrector(const BorderedFamily& bf, const BorderedThreshold& bt, double t, double eps,
                       double s);

struct BorderedReport {
  double remainder_norm = 0.0;
  double block_remainder_norm = 0.0;  // P^ (remainder) P^
  double bound_s_pos = 0.0;           // ||M||^2 s^{-1} e^{-cc tau^2 s / 2}
  double bound_s_nonneg = 0.0;        // ||M||^2 (s + 1)^{-1} e^{-cc tau^2 s / 2}
  double tau = 0.0;
};

/// Measures M e^{-B s} M^* - principal - K_G. The decay rate of the envelopes is
/// cstar_check of the unhatted family (`td`).
BorderedReport bordered_remainder(const BorderedFamily& bf, const BorderedThreshold& bt,
                                  const ThresholdData& td, double t, double eps, double s);

}  // namespace homog
