#pragma once

// Threshold analysis of a positive operator pencil
//   B(t, eps) = X(t)^* X(t) + eps (Y2^* Y(t) + Y(t)^* Y2) + eps^2 (Q + lambda Q0)
// with X(t) = X0 + t X1, Y(t) = Y0 + t Y1, on finite-dimensional spaces.
//
// Everything downstream of the family only needs Gram blocks (products of the
// operators), so the engine runs on GramFamily. AbstractFamily keeps the
// operators themselves and converts.

#include "homog/linalg.hpp"

#include <optional>
#include <random>
#include <vector>

namespace homog {

using Index = Eigen::Index;

struct FormConstants {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double beta = 0.0;
  double C1 = 0.0;   // C(nu) at nu = 1
  double Cnu = 0.0;  // C(nu) at nu = kappa^2 / (16 c1^2)
  bool estimated = false;
};

struct AbstractFamily {
  Mat X0, X1;  // H -> H_*
  Mat Y0, Y1;  // H -> H~
  Mat Y2;      // H -> H~
  Mat Q;       // Hermitian form on H
  Mat Q0;      // Hermitian positive definite
  double lambda = 0.0;
  double kappa = 1.0;
  FormConstants constants;

  Index dim_H() const { return X0.cols(); }
  Index dim_Hstar() const { return X0.rows(); }
  Index dim_Htilde() const { return Y0.rows(); }

  /// Throws InvalidInput on shape mismatch, non-Hermitian Q or Q0 not positive.
  void validate() const;
};

/// Gram blocks: AB means A^* B.
struct GramFamily {
  Mat X0X0, X1X0, X1X1;
  Mat Y0Y0, Y1Y0, Y1Y1;
  Mat Y2Y0, Y2Y1, Y2Y2;
  Mat Q, Q0;
  double lambda = 0.0;
  double kappa = 1.0;
  FormConstants constants;

  static GramFamily from(const AbstractFamily& f);

  Index dim() const { return X0X0.rows(); }
  Mat A(double t) const;     // X(t)^* X(t)
  Mat YtYt(double t) const;  // Y(t)^* Y(t)
  Mat B(double t, double eps) const;
  /// Family for B -> M^* B M: every block conjugated by M.
  GramFamily conjugated(const Mat& m) const;
};

struct FormConstantOptions {
  int t_samples = 81;
  double inflation = 1.1;
};

/// Estimates c0..c4, beta, C(1) from exact generalized eigenvalue bounds taken
/// over a grid of t, inflated by options.inflation.
FormConstants estimate_form_constants(const GramFamily& g, const FormConstantOptions& opt = {});

/// beta from lambda and the other constants.
double beta_from(const FormConstants& c, double lambda, const Mat& q0);

struct KernelInfo {
  Mat P;      // orthogonal projection onto Ker X0
  Mat basis;  // orthonormal columns spanning Ker X0
  Index n = 0;
  double d0 = 0.0;    // smallest nonzero eigenvalue of X0^* X0
  Mat range_basis;    // eigenvectors of X0^* X0 outside the kernel
  RVec range_values;  // matching eigenvalues
};

/// Kernel from the singular values of X0: sigma <= rel_tol * sigma_max.
KernelInfo kernel_projection(const Mat& x0, double rel_tol = 1e-10);
/// Kernel from eigenvalues of X0^* X0: eig <= rel_tol * eig_max.
KernelInfo kernel_projection_gram(const Mat& x0x0, double rel_tol = 1e-10);

/// Pseudo-inverse of X0^* X0 on the orthogonal complement of the kernel.
/// Throws IllConditioned if the restricted condition number exceeds cond_cap.
Mat restricted_pinv(const KernelInfo& k, double cond_cap = 1e12);

Mat solve_Z(const GramFamily& g, const KernelInfo& k, double cond_cap = 1e12);
Mat solve_Ztilde(const GramFamily& g, const KernelInfo& k, double cond_cap = 1e12);

struct ThresholdOptions {
  double kernel_rel_tol = 1e-10;
  double cond_cap = 1e12;
  std::optional<double> delta;
  std::optional<double> tau0;
  /// Supplied lower bound for A(t) / t^2; estimated on a t-grid otherwise.
  std::optional<double> cstar;
  bool estimate_constants = true;
  int cstar_samples = 40;
};

struct ThresholdData {
  KernelInfo kernel;
  Mat Z, Ztilde;
  Mat S;  // germ at theta = (1, 0), in the kernel basis
  std::optional<Mat> R;  // X1 P + X0 Z, only when the operators are known
  double delta = 0.0;
  double tau0 = 0.0;
  double cstar = 0.0;
  double cstar_check = 0.0;
  FormConstants constants;

  const Mat& P() const { return kernel.P; }
  const Mat& basis() const { return kernel.basis; }
  Index n() const { return kernel.n; }
  /// basis * m * basis^*
  Mat lift(const Mat& m) const;
};

ThresholdData threshold(const GramFamily& g, const ThresholdOptions& opt = {});
ThresholdData threshold(const AbstractFamily& f, const ThresholdOptions& opt = {});

/// Germ S(theta) as an n x n matrix in the kernel basis.
Mat germ(const GramFamily& g, const ThresholdData& td, double theta1, double theta2);

/// L(t, eps) = tau^2 S(theta), n x n in the kernel basis.
Mat effective_L(const GramFamily& g, const ThresholdData& td, double t, double eps);

struct NParts {
  Mat N11, N12, N21, N22;
  Mat at(double t, double eps) const;
};

/// Third-order parts from Gram blocks with the supplied Z, Z~ and kernel projection.
NParts n_parts(const GramFamily& g, const Mat& P, const Mat& Z, const Mat& Zt);
NParts n_parts(const GramFamily& g, const ThresholdData& td);
/// Same parts when Z = Z P and Z~ = Z~ P with P = b b^*, from the n-column factors
/// Z b and Z~ b. Cost is quadratic in dim instead of cubic.
NParts n_parts_on_kernel(const GramFamily& g, const Mat& b, const Mat& zb, const Mat& ztb);

Mat n_operator(const GramFamily& g, const ThresholdData& td, double t, double eps);

struct CorrectorOptions {
  /// Relative slack on the lower bound L >= cstar_check (t^2 + eps^2).
  double positivity_tol = 1e-9;
  bool check_positivity = true;
};

Mat corrector_K(const GramFamily& g, const ThresholdData& td, double t, double eps, double s,
                const CorrectorOptions& opt = {});

struct RemainderReport {
  double remainder_norm = 0.0;
  double bound_s_pos = 0.0;     // s^{-1} e^{-cc tau^2 s / 2}
  double bound_s_nonneg = 0.0;  // (s + 1)^{-1} e^{-cc tau^2 s / 2}
  double tau = 0.0;
};

RemainderReport exponential_remainder(const GramFamily& g, const ThresholdData& td, double t,
                                      double eps, double s, bool enforce_ball = true);

struct ProjectorReport {
  Index rank = 0;
  double norm_F_minus_P = 0.0;
  double norm_F_minus_P_F1 = 0.0;
  double norm_BF_minus_SP = 0.0;
  double norm_BF_minus_SP_K = 0.0;
};

ProjectorReport threshold_projector_checks(const GramFamily& g, const ThresholdData& td, double tau,
                                           double theta1, double theta2);

struct MDecompositionReport {
  RVec gamma;  // germ eigenvalues
  RVec mu;     // diagonal of N(theta) in the rotated germ basis
  Mat basis;   // rotated germ eigenbasis (n x n, in kernel coordinates)
  double nstar_norm = 0.0;
  double closed_vs_quadrature = 0.0;
  double quadrature_error_estimate = 0.0;
  bool degenerate_pair = false;
  Mat closed_form;  // M0 + M*, kernel coordinates
};

MDecompositionReport m_decomposition_check(const GramFamily& g, const ThresholdData& td, double tau,
                                           double theta1, double theta2, double s,
                                           double cluster_tol = 1e-10);

/// Random family satisfying the structural conditions: Ker X0 of dimension n,
/// Y(t) = W X(t) for a random W, lambda chosen so that beta = margin * min eig Q0.
struct RandomFamilySpec {
  Index dim = 8;
  Index n = 1;
  Index dim_star = 0;   // defaults to dim + 2
  Index dim_tilde = 0;  // defaults to dim
  double margin = 1.0;
};

AbstractFamily random_family(std::mt19937_64& rng, const RandomFamilySpec& spec);

/// Orthogonal direct sum of two families.
AbstractFamily direct_sum(const AbstractFamily& a, const AbstractFamily& b);

/// Worst sampled ratios for the defining inequalities of the constants.
struct ConstantsCheck {
  double max_Y_over_X = 0.0;           // ||Y(t)u|| / (c1 ||X(t)u||)
  double min_form_over_beta = 0.0;     // b(t,eps)[u,u] / (beta eps^2 ||u||^2)
};
ConstantsCheck check_constants(const GramFamily& g, std::mt19937_64& rng, int samples = 200);

}  // namespace homog
