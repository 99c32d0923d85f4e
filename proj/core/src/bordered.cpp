#include "homog/bordered.hpp"

#include "homog/errors.hpp"

#include <cmath>
#include <limits>

namespace homog {

BorderedFamily BorderedFamily::make(GramFamily hatted, Mat m) {
  const Index h = hatted.dim();
  if (m.rows() != h || m.cols() != h) throw Error(ErrorCode::InvalidInput, "M shape");
  if ((hatted.Q0 - Mat::Identity(h, h)).norm() > 1e-12)
    throw Error(ErrorCode::InvalidInput, "hatted family must have Q0 = I");
  const RVec sv = Eigen::JacobiSVD<Mat>(m).singularValues();
  if (!(sv(h - 1) > 1e-14 * sv(0)))
    throw Error(ErrorCode::InvalidInput, "M is not invertible");
  BorderedFamily bf;
  bf.G = inv_hpd(hermitian_part(m * m.adjoint()));
  bf.base = std::move(hatted);
  bf.M = std::move(m);
  return bf;
}

GramFamily BorderedFamily::unhatted() const { return base.conjugated(M); }

BorderedThreshold bordered_threshold(const BorderedFamily& bf, const ThresholdOptions& opt) {
  BorderedThreshold bt;
  bt.hat = threshold(bf.base, opt);
  const Mat& v = bt.V();
  const Mat gn = hermitian_part(v.adjoint() * bf.G * v);
  bt.M0 = inv_sqrt_hpd(gn);
  const Mat gi = inv_hpd(gn);
  auto shift = [&](const Mat& z) -> Mat { return v * (gi * (v.adjoint() * (bf.G * z))); };
  bt.ZG = bt.hat.Z - shift(bt.hat.Z);
  bt.ZtG = bt.hat.Ztilde - shift(bt.hat.Ztilde);
  const Mat& b = bt.hat.basis();
  bt.NG = n_parts_on_kernel(bf.base, b, bt.ZG * b, bt.ZtG * b);
  return bt;
}

Mat bordered_principal(const BorderedFamily& bf, const BorderedThreshold& bt, double t, double eps,
                       double s) {
  const Mat& v = bt.V();
  const Mat l = bt.M0 * effective_L(bf.base, bt.hat, t, eps) * bt.M0;
  return v * bt.M0 * heat(l, s) * bt.M0 * v.adjoint();
}

Mat bordered_corrector(const BorderedFamily& bf, const BorderedThreshold& bt, double t, double eps,
                       double s) {
  const Mat& v = bt.V();
  const HermEig l = herm_eig(bt.M0 * effective_L(bf.base, bt.hat, t, eps) * bt.M0);
  const Mat e = v * bt.M0 * heat(l, s) * bt.M0 * v.adjoint();
  const Mat zz = t * bt.ZG + eps * bt.ZtG;
  const Mat n = bt.M0 * v.adjoint() * bt.NG.at(t, eps) * v * bt.M0;
  return zz * e + e * zz.adjoint() - v * bt.M0 * sandwich_integral(l, n, s) * bt.M0 * v.adjoint();
}

BorderedReport bordered_remainder(const BorderedFamily& bf, const BorderedThreshold& bt,
                                  const ThresholdData& td, double t, double eps, double s) {
  BorderedReport rep;
  rep.tau = std::sqrt(t * t + eps * eps);
  const GramFamily g = bf.unhatted();
  const Mat r = bf.M * heat(g.B(t, eps), s) * bf.M.adjoint() - bordered_principal(bf, bt, t, eps, s) -
                bordered_corrector(bf, bt, t, eps, s);
  rep.remainder_norm = op_norm(r);
  rep.block_remainder_norm = op_norm(bt.hat.P() * r * bt.hat.P());
  const double m2 = std::pow(op_norm(bf.M), 2);
  const double decay = std::exp(-td.cstar_check * rep.tau * rep.tau * s / 2.0);
  rep.bound_s_pos = s > 0.0 ? m2 * decay / s : std::numeric_limits<double>::infinity();
  rep.bound_s_nonneg = m2 * decay / (s + 1.0);
  return rep;
}

}  // namespace homog
