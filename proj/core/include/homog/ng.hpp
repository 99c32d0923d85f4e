#pragma once

// Third-order part of the threshold expansion for the periodic operator:
//   N_G(k, eps) = N11(k) + eps N12(k) + eps^2 N21(k) + eps^3 N22
// assembled from cell averages of products of Lambda_G, LambdaT_G, g~, g, a_j, Q.
// Coefficients linear in k are stored per axis.

#include "homog/cell.hpp"

namespace homog {

struct NGCoefficients {
  Index n = 1, m = 1;
  std::vector<Mat> b;      // symbol blocks b_j
  std::vector<Mat> MG;     // m x m, M_G(k) = sum_j k_j MG[j]
  Mat TG0;                 // m x m
  std::vector<Mat> MG1;    // n x m
  std::vector<Mat> MG2;    // n x n
  Mat TG;                  // m x n
  std::vector<Mat> AT;     // n x n, mean((a_j + a_j^*) LambdaT_G)
  Mat TtG;                 // n x n

  Mat symbol(const RVec& k) const;
  Mat M_G(const RVec& k) const;
  Mat N11(const RVec& k) const;
  Mat N12(const RVec& k) const;
  Mat N21(const RVec& k) const;
  Mat N22() const;
  Mat at(const RVec& k, double eps) const;
  /// True when every coefficient vanishes to `tol` (absolute).
  bool vanishes(double tol = 1e-12) const;
};

NGCoefficients ng_coefficients(const FiberContext& ctx, const CellSolution& cell);

}  // namespace homog
