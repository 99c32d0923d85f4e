#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>

namespace homog {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
struct HermEig {
  RVec values;
  Mat vectors;

  Eigen::Index size() const { return values.size(); }
  Mat apply(const std::function<double(double)>& fn) const;
};

HermEig herm_eig(const Mat& a);

Mat hermitian_part(const Mat& a);

/// Relative Frobenius defect ||A - A*|| / max(||A||, tiny).
double hermitian_defect(const Mat& a);

/// e^{-A s} for Hermitian A.
Mat heat(const HermEig& e, double s);
Mat heat(const Mat& a, double s);

Mat sqrt_hpd(const Mat& a);
Mat inv_sqrt_hpd(const Mat& a);
Mat inv_hpd(const Mat& a);

/// Spectral norm. Full SVD up to kDenseNormLimit, power iteration above.
inline constexpr Eigen::Index kDenseNormLimit = 512;
double op_norm(const Mat& a);
double op_norm_power(const Mat& a, int iterations = 20, int probes = 3,
                     std::uint64_t seed = 0x5eedULL);

/// Integral of e^{-a(s-u)} e^{-b u} over u in [0, s]. Switches to s e^{-a s}
/// when |a - b| <= confluent_tol * max(|a|, |b|).
double duhamel_weight(double a, double b, double s, double confluent_tol = 1e-10);

/// Integral over [0, s] of e^{-L(s-u)} N e^{-L u} in the eigenbasis of L.
Mat sandwich_integral(const HermEig& l, const Mat& n, double s);

/// Orthonormal basis of the span of the columns with singular values above rel_tol * max.
Mat orth(const Mat& a, double rel_tol = 1e-12);

}  // namespace homog
