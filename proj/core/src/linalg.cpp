#include "homog/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace homog {

Mat HermEig::apply(const std::function<double(double)>& fn) const {
  RVec f(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) f(i) = fn(values(i));
  return vectors * f.cast<cplx>().asDiagonal() * vectors.adjoint();
}

Mat hermitian_part(const Mat& a) { return 0.5 * (a + a.adjoint()); }

double hermitian_defect(const Mat& a) {
  const double na = a.norm();
  if (na == 0.0) return 0.0;
  return (a - a.adjoint()).norm() / na;
}

HermEig herm_eig(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a));
  return {es.eigenvalues(), es.eigenvectors()};
}

Mat heat(const HermEig& e, double s) {
  return e.apply([s](double x) { return std::exp(-x * s); });
}

Mat heat(const Mat& a, double s) { return heat(herm_eig(a), s); }

Mat sqrt_hpd(const Mat& a) {
  return herm_eig(a).apply([](double x) { return std::sqrt(std::max(x, 0.0)); });
}

Mat inv_sqrt_hpd(const Mat& a) {
  return herm_eig(a).apply([](double x) { return 1.0 / std::sqrt(x); });
}

Mat inv_hpd(const Mat& a) {
  return herm_eig(a).apply([](double x) { return 1.0 / x; });
}

double op_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  if (std::max(a.rows(), a.cols()) <= kDenseNormLimit) {
    Eigen::BDCSVD<Mat> svd(a);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  }
  return op_norm_power(a);
}

double op_norm_power(const Mat& a, int iterations, int probes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  double best = 0.0;
  for (int p = 0; p < probes; ++p) {
    Vec v(a.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(nd(rng), nd(rng));
    v.normalize();
    double est = 0.0;
    for (int it = 0; it < iterations; ++it) {
      Vec w = a.adjoint() * (a * v);
      const double nw = w.norm();
      if (nw == 0.0) break;
      est = std::sqrt(nw);
      v = w / nw;
    }
    best = std::max(best, std::max(est, (a * v).norm()));
  }
  return best;
}

double duhamel_weight(double a, double b, double s, double confluent_tol) {
  const double lo = std::min(a, b);
  const double gap = std::abs(a - b);
  const double scale = std::max(std::abs(a), std::abs(b));
  if (gap <= confluent_tol * scale) return s * std::exp(-lo * s);
  return std::exp(-lo * s) * (-std::expm1(-gap * s)) / gap;
}

Mat sandwich_integral(const HermEig& l, const Mat& n, double s) {
  Mat nt = l.vectors.adjoint() * n * l.vectors;
  for (Eigen::Index i = 0; i < nt.rows(); ++i)
    for (Eigen::Index j = 0; j < nt.cols(); ++j)
      nt(i, j) *= duhamel_weight(l.values(i), l.values(j), s);
  return l.vectors * nt * l.vectors.adjoint();
}

Mat orth(const Mat& a, double rel_tol) {
  if (a.cols() == 0) return Mat(a.rows(), 0);
  Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index r = 0;
  const double smax = sv.size() ? sv(0) : 0.0;
  while (r < sv.size() && sv(r) > rel_tol * smax && sv(r) > 0.0) ++r;
  return svd.matrixU().leftCols(r);
}

}  // namespace homog
