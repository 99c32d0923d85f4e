#pragma once

// Periodic differential operator data:
//   B = f^* (b(D)^* g b(D) + sum_j (a_j D_j + D_j a_j^*) + Q + lambda Q0) f
// on the lattice cell, with b(D) = sum_j b_j D_j and constant b_j (m x n).

#include "homog/fourier.hpp"
#include "homog/lattice.hpp"

#include <optional>
#include <string>

namespace homog {

using Point = std::array<double, 3>;

/// Square matrix-valued periodic coefficient, either closed form in reduced
/// coordinates or samples on a grid (resampled spectrally on demand).
struct CoefField {
  Index size = 0;
  std::function<Mat(const Point&)> fn;
  std::optional<MatField> samples;
  Grid sample_grid;

  MatField sample(const Grid& g) const;

  static CoefField constant(const Mat& v);
  static CoefField closed_form(Index size, std::function<Mat(const Point&)> fn);
  static CoefField from_samples(const Grid& g, MatField f);
};

/// Trigonometric resampling between grids: keeps frequencies |r_i| < M_src / 2.
MatField resample(const Grid& src, const MatField& f, const Grid& dst);

struct PeriodicProblem {
  std::string name;
  Lattice lattice;
  Index n = 1, m = 1;
  std::vector<Mat> b;         // d matrices m x n
  CoefField g;                // m x m, positive definite
  std::optional<CoefField> f; // n x n, invertible; identity when absent
  std::vector<CoefField> a;   // d fields n x n; empty means zero
  std::optional<CoefField> Q; // n x n Hermitian; zero when absent
  double lambda = 0.0;

  int d() const { return lattice.d; }
  /// b(xi) = sum_j b_j xi_j
  Mat symbol(const RVec& xi) const;
  bool has_f() const { return f.has_value(); }
  bool has_a() const { return !a.empty(); }
  bool has_Q() const { return Q.has_value(); }

  /// Shapes, rank of b(theta) on sampled directions, positivity of g and
  /// invertibility of f on the grid. Throws InvalidInput or PositivityViolation.
  void validate(const Grid& grid) const;
};

/// Pointwise Hermitian square root of g.
MatField h_field(const MatField& g);

/// min / max eigenvalue of b(theta)^* b(theta) over sampled unit theta.
std::pair<double, double> symbol_bounds(const PeriodicProblem& p, int samples = 256);

}  // namespace homog
