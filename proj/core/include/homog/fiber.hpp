#pragma once

// Fiber matrices B(k, eps) of a periodic operator on truncated Fourier modes.
//
// Hatted fiber (f = 1):
//   B^(k, eps) = b(D+k)^* g b(D+k) + eps sum_j (a_j (D_j+k_j) + (D_j+k_j) a_j^*)
//                + eps^2 (Q + lambda)
// All coefficient products use grid quadrature, so the Galerkin matrices are
// exact Gram matrices of the discrete forms. With a weight f the fiber is
// M B^ M, M = Gal(G)^{-1/2}, G = (f f^*)^{-1}; M plays the role of f^* up to a
// pointwise unitary, which leaves f e^{-B s} f^* unchanged.

#include "homog/abstract.hpp"
#include "homog/bordered.hpp"
#include "homog/problem.hpp"

namespace homog {

struct FiberContext {
  PeriodicProblem problem;
  ModeSet modes;
  Grid grid;
  std::vector<RVec> xi;  // wavevector of each mode

  MatField g, G;               // G = (f f^*)^{-1}
  std::optional<MatField> f;
  std::vector<MatField> a;
  std::optional<MatField> Q;

  std::vector<Mat> g_hat;      // g coefficients indexed by mode difference
  std::vector<Mat> gal_a;      // Gal(a_j)
  Mat gal_Q, gal_aa;           // Gal(Q), Gal(sum a_j a_j^*)
  Mat gal_G, M;                // only with a weight; M = gal_G^{-1/2}

  Index n() const { return problem.n; }
  Index m() const { return problem.m; }
  int d() const { return problem.d(); }
  Index dim() const { return modes.count() * problem.n; }
  Index zero_mode() const { return modes.zero(); }
  bool weighted() const { return f.has_value(); }
  /// Embedding of constants: zero-mode block of the identity, dim x n.
  Mat constants_embedding() const;
  /// Coefficient of g at mode difference p - q.
  const Mat& g_diff(Index p, Index q) const;
};

/// Throws InvalidInput / PositivityViolation through PeriodicProblem::validate.
FiberContext make_fiber_context(const PeriodicProblem& problem, int N, int grid_factor = 4);

/// Principal part b(D+k)^* g b(D+k).
Mat principal_matrix(const FiberContext& ctx, const RVec& k);
Mat assemble_hatted(const FiberContext& ctx, const RVec& k, double eps);

struct AssembleOptions {
  bool check_positivity = true;
  double hermitian_tol = 1e-10;
};

/// Fiber matrix B(k, eps) (bordered by M when a weight is present). Throws
/// PositivityViolation if it is not Hermitian or, for (k, eps) != 0, not positive.
Mat assemble_fiber(const FiberContext& ctx, const RVec& k, double eps, const AssembleOptions& opt = {});

/// Gram blocks of the hatted family along the unit direction theta (Q0 = I).
GramFamily hatted_gram(const FiberContext& ctx, const RVec& theta);
/// Hatted family with its bordering M (identity without a weight).
BorderedFamily bordered_gram(const FiberContext& ctx, const RVec& theta);
/// The operators X0, X1, Y0, Y1, Y2 themselves, as maps from mode coefficients
/// to grid values scaled by 1/sqrt(points). Only for small truncations.
AbstractFamily hatted_operators(const FiberContext& ctx, const RVec& theta);

/// Constants of the operator family from coefficient bounds. With a bounded Q
/// the form bound c~ vanishes, so kappa = 1 and c2 = 0.
struct FiberConstants {
  double alpha0 = 0, alpha1 = 0;
  double g_norm = 0, ginv_norm = 0, f_norm = 1, finv_norm = 1;
  double a_sq_sum = 0;  // sum_j ||a_j||_inf^2
  double Q_norm = 0, c0_hat = 0;
  double kappa = 1;
  double c0 = 0, c1 = 0, c2 = 0, c3 = 0, c4 = 0, C = 0;
  double beta = 0;
  double cstar_hat = 0, cstar = 0, ccheck = 0;
  double r0 = 0, delta = 0, tau0 = 0;
  double lambda = 0;
};

/// `hatted` evaluates the constants with f = 1 (the family Gal-bordering removes).
FiberConstants fiber_constants(const FiberContext& ctx, bool hatted = false);
FormConstants to_form_constants(const FiberConstants& c);
ThresholdOptions threshold_options(const FiberConstants& c);

/// Smallest lambda giving beta > margin for this problem's coefficients.
double admissible_lambda(const PeriodicProblem& problem, int N = 4, double margin = 0.25);

/// min over sampled (k, eps) of lambda_min(B(k, eps)) / (|k|^2 + eps^2): k on a
/// uniform grid of the Brillouin zone (per_axis points per axis), eps from `eps_list`.
double measured_lower_constant(const FiberContext& ctx, int per_axis, const std::vector<double>& eps_list,
                               int threads = 0);

/// Quasimomenta of a per_axis^d grid of the Brillouin zone, cell-centred.
std::vector<RVec> brillouin_grid(const Lattice& lat, int per_axis);

}  // namespace homog
