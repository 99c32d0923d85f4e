#pragma once

// Periodic magnetic Schrodinger operator
//   (D - A)^* g (D - A) + eps^{-1} v + V,   mean v = 0, real g, A, v, V,
// rewritten as D^* g D + sum_j (a_j D_j + D_j a_j^*) + Q with
//   a_j = -eta_j + i zeta_j,  eta = g A,  zeta = -grad Phi,  Laplace Phi = v,
//   Q = V + <g A, A>.
// Effective data and third-order coefficients are computed here from scalar real
// recipes, independently of the generic matrix pipeline, so the two can be compared.

#include "homog/evolution.hpp"
#include "homog/problem.hpp"

namespace homog {

struct ScalarInput {
  Lattice lattice;
  CoefField g;               // d x d, real symmetric positive definite
  std::vector<CoefField> A;  // d scalar fields
  CoefField v;               // scalar, mean zero
  CoefField Vcal;            // scalar
  double lambda = 0.0;
};

struct ScalarBuildOptions {
  int grid_points = 32;     // per axis, for the Poisson solve and the derived fields
  double mean_tol = 1e-12;  // allowed |mean v|
};

/// Derived potentials sampled on a grid.
struct ScalarPotentials {
  Grid grid;
  Vec Phi;                  // mean zero, Laplace Phi = v
  std::vector<Vec> zeta;    // -grad Phi
  std::vector<Vec> eta;     // g A
  Vec Q;                    // V + <g A, A>
  Vec divergence_check;     // -sum_j d_j zeta_j, equals v
};

/// Throws MeanNotZero when |mean v| exceeds the tolerance.
ScalarPotentials scalar_potentials(const ScalarInput& in, const ScalarBuildOptions& opt = {});
PeriodicProblem build_scalar_problem(const ScalarInput& in, const ScalarBuildOptions& opt = {});

struct ScalarEffective {
  ModeSet modes;
  Grid grid;
  // mode coefficients (count rows); Psi has one column per axis
  Mat Psi_c;
  Vec LT1_c, LT2_c;
  // grid samples
  std::vector<Vec> Psi;                    // psi_j
  std::vector<std::vector<Vec>> grad_Psi;  // grad_Psi[j][i] = d_i psi_j
  Vec LT1, LT2;
  std::vector<Vec> grad_LT1, grad_LT2;
  MatField g, gtilde;
  std::vector<Vec> eta;
  Vec v, Q;
  RMat g0;
  RVec V1, V2, A0, eta_mean;
  double W = 0.0, V0 = 0.0, Qbar = 0.0, lambda = 0.0;
  double imag_residual = 0.0;  // largest imaginary part among the fields that should be real

  /// (k - eps A0)^T g0 (k - eps A0) + eps^2 (V0 + lambda)
  double symbol(const RVec& k, double eps) const;
};

/// Cell problems for psi_j and the two real lower-order correctors on modes |p_i| <= N.
ScalarEffective scalar_effective(const ScalarInput& in, int N, const ScalarBuildOptions& opt = {});

struct ScalarN {
  RMat N12_raw;  // the product means as written; not symmetric in (k, l) in general
  RMat N12;      // symmetric part, the only part that acts through D_k D_l
  RVec N21;  // d
  double N22 = 0.0;
  /// eps N12[k, k] + eps^2 N21.k + eps^3 N22
  double symbol(const RVec& k, double eps) const;
};

ScalarN scalar_N_coefficients(const ScalarEffective& eff);

/// Fiber corrector in the commuted form: the integral term is s' N e^{-B0 s'} mode by mode.
Mat scalar_corrector_matrix(const ScalarEffective& eff, const ScalarN& N, const BoxSetup& box, Index fiber, double s,
                            CorrectorVariant v);

/// Largest deviations between the closed forms above and the generic pipeline
/// (cell problems, third-order symbol, fiber corrector) at the same truncation.
struct ScalarCrossCheck {
  double effective = 0.0;    // g0, V, W, A0, V0
  double third_order = 0.0;  // N11 = 0, N12, N21, N22 by polarization
  double corrector = 0.0;    // commuted vs generic corrector, relative, both variants
};

/// Corrector comparison on a box of `cells` periods at eps and time s.
ScalarCrossCheck scalar_cross_check(const ScalarInput& in, int N, double eps = 0.25, int cells = 4, double s = 0.2);

struct ScalarPresetOptions {
  int d = 2;
  double g_amp = 0.5;
  double A_amp = 0.3;
  double v_amp = 0.5;
  double V_amp = 0.3;
  double lambda = 1.0;
};

ScalarInput preset_scalar_schrodinger(const ScalarPresetOptions& opt = {});

}  // namespace homog
