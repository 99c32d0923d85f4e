#pragma once

// Fourier modes, sampling grids and grid-quadrature Galerkin matrices on the
// unit cell in reduced coordinates y in [0,1)^d.
//
// Vectors of mode coefficients are stored mode-major: entry p * n + c holds
// component c of mode p. Grid data is row-major with the last axis fastest,
// matching FFTW.

#include "homog/linalg.hpp"

#include <array>
#include <vector>

namespace homog {

using Index = Eigen::Index;
using IVec = std::array<int, 3>;

/// Integer modes p in [-N, N]^d, first axis slowest.
struct ModeSet {
  int d = 1;
  int N = 0;
  std::vector<IVec> modes;

  Index count() const { return static_cast<Index>(modes.size()); }
  Index index(const IVec& p) const;  // -1 if outside the truncation
  Index zero() const { return (count() - 1) / 2; }
};

ModeSet make_modes(int d, int N);

struct Grid {
  int d = 1;
  int M = 4;  // points per axis

  Index size() const;
  /// Reduced coordinates of grid point i.
  std::array<double, 3> point(Index i) const;
  /// Position of frequency r in the FFT array (frequencies taken mod M).
  Index freq_index(const IVec& r) const;
};

/// Grid with factor * N points per axis (at least 2N + 1).
Grid grid_for(const ModeSet& modes, int factor = 4);

/// Discrete Fourier coefficients c(r) = mean_y u(y) e^{-2 pi i r.y}, full FFT layout.
Vec dft(const Grid& g, const Vec& samples);
/// Inverse of dft: u(y) = sum_r c(r) e^{2 pi i r.y}.
Vec idft(const Grid& g, const Vec& coeffs);

/// Matrix-valued field sampled on a grid. Entry (i, j) is a scalar field.
struct MatField {
  Index rows = 0, cols = 0;
  std::vector<Vec> e;  // rows * cols scalar fields

  MatField() = default;
  MatField(Index r, Index c, Index points);
  Index points() const { return e.empty() ? 0 : e.front().size(); }
  Vec& at(Index i, Index j) { return e[static_cast<std::size_t>(i * cols + j)]; }
  const Vec& at(Index i, Index j) const { return e[static_cast<std::size_t>(i * cols + j)]; }
  Mat value(Index point) const;
  void set(Index point, const Mat& v);
  Mat mean() const;
  MatField adjoint() const;
  double sup_norm() const;  // max pointwise spectral norm
};

MatField operator*(const MatField& a, const MatField& b);
MatField operator+(const MatField& a, const MatField& b);
MatField operator-(const MatField& a, const MatField& b);
MatField scaled(const MatField& a, cplx s);
MatField constant_field(const Mat& v, Index points);
/// Pointwise map.
MatField map_field(const MatField& a, const std::function<Mat(const Mat&)>& fn);

/// Fourier coefficients of a matrix field, full FFT layout per entry.
struct MatCoeffs {
  Grid grid;
  Index rows = 0, cols = 0;
  std::vector<Vec> e;
  Mat at(const IVec& r) const;
};

MatCoeffs dft(const Grid& g, const MatField& f);

/// Galerkin matrix of multiplication by the field: block (p, q) = c(p - q).
Mat galerkin(const ModeSet& modes, const MatCoeffs& c);

/// Truncated coefficients, (count * rows) x cols, block p = c(p).
Mat truncate(const ModeSet& modes, const MatCoeffs& c);

/// Field with mode coefficients `coeffs` ((count * rows) x cols), sampled on the grid.
MatField synthesize(const ModeSet& modes, const Grid& g, const Mat& coeffs, Index rows);

/// Exponent p - q for two modes.
IVec mode_diff(const IVec& p, const IVec& q);

}  // namespace homog
