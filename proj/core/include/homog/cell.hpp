#pragma once

// Periodic cell problems and effective characteristics.
//   Lambda  (n x m): b(D)^* g (b(D) Lambda + 1_m) = 0, mean zero
//   LambdaT (n x n): b(D)^* g b(D) LambdaT = -sum_j D_j a_j^*, mean zero
// Lambda_G = Lambda + Lambda_G0 with mean(G Lambda_G) = 0, likewise LambdaT_G.

#include "homog/fiber.hpp"

#include <string>

namespace homog {

struct CellOptions {
  Index dense_limit = 4096;  // dense Cholesky up to this many unknowns, CG beyond
  double cg_tol = 1e-13;
  int cg_max_iter = 5000;
  double cond_cap = 1e12;
};

struct CellSolution {
  // mode coefficients, mode-major (count * n rows)
  Mat Lambda, LambdaT;
  Mat LambdaG0, LambdaTG0;
  // grid fields
  MatField Lambda_f, LambdaT_f;   // mean zero
  MatField bLambda, bLambdaT;     // b(D) Lambda, b(D) LambdaT
  MatField gtilde;                // g (b(D) Lambda + 1)

  Mat g0, V, W, Qbar, f0, Gbar;
  Mat g_harmonic;           // (mean g^{-1})^{-1}
  Mat g_mean;               // mean g
  std::vector<Mat> a_sym;   // mean(a_j + a_j^*)
  double lambda = 0.0;
  double residual = 0.0;    // relative residual of the cell solves
  bool iterative = false;

  /// Lambda_G, LambdaT_G mode coefficients (zero-mode block shifted by the constant).
  Mat LambdaG(const FiberContext& ctx) const;
  Mat LambdaTG(const FiberContext& ctx) const;
};

/// Throws IllConditioned if the Galerkin system cannot be solved.
CellSolution solve_cell_problems(const FiberContext& ctx, const CellOptions& opt = {});

/// Effective symbol L^(k, eps) = b(k)^* g0 b(k) - eps (b(k)^* V + V^* b(k))
///   + eps sum_j mean(a_j + a_j^*) k_j + eps^2 (Qbar - W + lambda).
Mat effective_symbol(const FiberContext& ctx, const CellSolution& cell, const RVec& k, double eps);
/// f0 L^ f0
Mat effective_operator(const FiberContext& ctx, const CellSolution& cell, const RVec& k, double eps);

/// JSON with g0, V, W, Qbar, f0, Lambda_G0, LambdaT_G0 as {"re": [[..]], "im": [[..]]}.
std::string cell_json(const CellSolution& cell);

}  // namespace homog
