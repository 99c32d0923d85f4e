#include "homog/ng.hpp"

namespace homog {
namespace {

Mat two_re(const Mat& x) { return x + x.adjoint(); }

// D_j applied to a field given by mode coefficients: multiply mode p by xi_p(j).
MatField derivative(const FiberContext& ctx, const Mat& coeffs, int j) {
  const Index n = ctx.n();
  Mat out = coeffs;
  for (Index p = 0; p < ctx.modes.count(); ++p) out.middleRows(p * n, n) *= ctx.xi[static_cast<std::size_t>(p)](j);
  return synthesize(ctx.modes, ctx.grid, out, n);
}

}  // namespace

Mat NGCoefficients::symbol(const RVec& k) const {
  Mat s = Mat::Zero(m, n);
  for (std::size_t j = 0; j < b.size(); ++j) s += b[j] * k(static_cast<Index>(j));
  return s;
}

Mat NGCoefficients::M_G(const RVec& k) const {
  Mat s = Mat::Zero(m, m);
  for (std::size_t j = 0; j < MG.size(); ++j) s += k(static_cast<Index>(j)) * MG[j];
  return s;
}

Mat NGCoefficients::N11(const RVec& k) const {
  const Mat bk = symbol(k);
  return bk.adjoint() * M_G(k) * bk;
}

Mat NGCoefficients::N12(const RVec& k) const {
  const Mat bk = symbol(k);
  Mat m1 = Mat::Zero(n, m);
  for (std::size_t j = 0; j < MG1.size(); ++j) m1 += k(static_cast<Index>(j)) * MG1[j];
  return bk.adjoint() * TG0 * bk + m1 * bk + bk.adjoint() * m1.adjoint();
}

Mat NGCoefficients::N21(const RVec& k) const {
  const Mat bk = symbol(k);
  Mat m2 = Mat::Zero(n, n), at = Mat::Zero(n, n);
  for (std::size_t j = 0; j < MG2.size(); ++j) m2 += k(static_cast<Index>(j)) * MG2[j];
  for (std::size_t j = 0; j < AT.size(); ++j) at += k(static_cast<Index>(j)) * AT[j];
  return two_re(m2) + TG.adjoint() * bk + bk.adjoint() * TG + two_re(at);
}

Mat NGCoefficients::N22() const { return two_re(TtG); }

Mat NGCoefficients::at(const RVec& k, double eps) const {
  return N11(k) + eps * N12(k) + eps * eps * N21(k) + eps * eps * eps * N22();
}

bool NGCoefficients::vanishes(double tol) const {
  auto small = [tol](const Mat& x) { return x.size() == 0 || x.cwiseAbs().maxCoeff() <= tol; };
  auto all_small = [&](const std::vector<Mat>& v) {
    for (const Mat& x : v)
      if (!small(x)) return false;
    return true;
  };
  return all_small(MG) && small(TG0) && all_small(MG1) && all_small(MG2) && small(TG) && all_small(AT) &&
         small(TtG);
}

NGCoefficients ng_coefficients(const FiberContext& ctx, const CellSolution& cell) {
  const Index n = ctx.n(), m = ctx.m(), pts = ctx.grid.size();
  const int d = ctx.d();
  NGCoefficients c;
  c.n = n;
  c.m = m;
  c.b = ctx.problem.b;

  const MatField LG = synthesize(ctx.modes, ctx.grid, cell.LambdaG(ctx), n);
  const MatField LTG = synthesize(ctx.modes, ctx.grid, cell.LambdaTG(ctx), n);
  const MatField LGh = LG.adjoint(), LTGh = LTG.adjoint();
  const MatField& gt = cell.gtilde;
  const MatField gth = gt.adjoint();
  const MatField bLTh_g = cell.bLambdaT.adjoint() * ctx.g;  // (b LambdaT_G)^* g

  std::vector<MatField> DL, DLT;
  for (int j = 0; j < d; ++j) {
    DL.push_back(derivative(ctx, cell.Lambda, j));
    DLT.push_back(derivative(ctx, cell.LambdaT, j));
  }

  c.TG0 = Mat::Zero(m, m);
  c.TG = Mat::Zero(m, n);
  c.TtG = Mat::Zero(n, n);
  for (int j = 0; j < d; ++j) {
    const MatField bj = constant_field(ctx.problem.b[static_cast<std::size_t>(j)], pts);
    const MatField bjh = bj.adjoint();
    c.MG.push_back((LGh * bjh * gt).mean() + (gth * bj * LG).mean());
    Mat m1 = (LTGh * bjh * gt).mean() + (bLTh_g * bj * LG).mean();
    Mat at = Mat::Zero(n, n);
    if (ctx.problem.has_a()) {
      const MatField& aj = ctx.a[static_cast<std::size_t>(j)];
      const MatField asym = aj + aj.adjoint();
      m1 += (asym * LG).mean();
      at = (asym * LTG).mean();
      c.TG0 += two_re((LGh * aj * DL[static_cast<std::size_t>(j)]).mean());
      c.TG += (LGh * aj * DLT[static_cast<std::size_t>(j)]).mean() +
              (DL[static_cast<std::size_t>(j)].adjoint() * aj.adjoint() * LTG).mean();
      c.TtG += (LTGh * aj * DLT[static_cast<std::size_t>(j)]).mean();
    }
    c.MG1.push_back(m1);
    c.MG2.push_back((bLTh_g * bj * LTG).mean());
    c.AT.push_back(at);
  }
  if (ctx.Q) {
    c.TG += (LGh * *ctx.Q).mean();
    c.TtG += (LTGh * *ctx.Q).mean();
  }
  c.TG += ctx.problem.lambda * LGh.mean();
  c.TtG += ctx.problem.lambda * LTGh.mean();
  return c;
}

}  // namespace homog
