#include "homog/cell.hpp"

#include "homog/errors.hpp"

#include <json.hpp>

#include <cmath>

namespace homog {
namespace {

// Galerkin principal part at k = 0 applied through the grid: b(D)^* g b(D) v.
Mat apply_principal(const FiberContext& ctx, const Mat& v) {
  const Index cnt = ctx.modes.count(), n = ctx.n(), m = ctx.m();
  Mat bv(cnt * m, v.cols());
  for (Index p = 0; p < cnt; ++p)
    bv.middleRows(p * m, m) = ctx.problem.symbol(ctx.xi[static_cast<std::size_t>(p)]) * v.middleRows(p * n, n);
  const MatField gbv = ctx.g * synthesize(ctx.modes, ctx.grid, bv, m);
  const Mat c = truncate(ctx.modes, dft(ctx.grid, gbv));
  Mat out(cnt * n, v.cols());
  for (Index p = 0; p < cnt; ++p)
    out.middleRows(p * n, n) = ctx.problem.symbol(ctx.xi[static_cast<std::size_t>(p)]).adjoint() * c.middleRows(p * m, m);
  return out;
}

// Block-Jacobi preconditioned CG, all right-hand sides at once, zero mode pinned.
Mat solve_cg(const FiberContext& ctx, const Mat& rhs, const CellOptions& opt, double& residual) {
  const Index cnt = ctx.modes.count(), n = ctx.n(), z = ctx.zero_mode();
  const Mat gbar = ctx.g_diff(z, z);
  std::vector<Mat> precond(static_cast<std::size_t>(cnt));
  for (Index p = 0; p < cnt; ++p) {
    if (p == z) continue;
    const Mat bp = ctx.problem.symbol(ctx.xi[static_cast<std::size_t>(p)]);
    precond[static_cast<std::size_t>(p)] = inv_hpd(hermitian_part(bp.adjoint() * gbar * bp));
  }
  auto apply_a = [&](Mat v) {
    v.middleRows(z * n, n).setZero();
    Mat out = apply_principal(ctx, v);
    out.middleRows(z * n, n).setZero();
    return out;
  };
  auto apply_m = [&](const Mat& r) {
    Mat out = Mat::Zero(r.rows(), r.cols());
    for (Index p = 0; p < cnt; ++p)
      if (p != z) out.middleRows(p * n, n) = precond[static_cast<std::size_t>(p)] * r.middleRows(p * n, n);
    return out;
  };
  Mat x = Mat::Zero(rhs.rows(), rhs.cols());
  residual = 0.0;
  for (Index c = 0; c < rhs.cols(); ++c) {
    const Vec b = rhs.col(c);
    const double bn = b.norm();
    if (bn == 0.0) continue;
    Vec xc = Vec::Zero(b.size());
    Vec r = b;
    Vec zc = apply_m(r);
    Vec p = zc;
    cplx rz = r.dot(zc);
    int it = 0;
    for (; it < opt.cg_max_iter && r.norm() > opt.cg_tol * bn; ++it) {
      const Vec ap = apply_a(p);
      const cplx alpha = rz / p.dot(ap);
      xc += alpha * p;
      r -= alpha * ap;
      zc = apply_m(r);
      const cplx rz_new = r.dot(zc);
      p = zc + (rz_new / rz) * p;
      rz = rz_new;
    }
    const double rel = (apply_a(xc) - b).norm() / bn;
    if (!(rel < 1e3 * opt.cg_tol + 1e-10))
      throw Error(ErrorCode::IllConditioned, "cell problem CG did not converge (residual " + std::to_string(rel) + ")");
    residual = std::max(residual, rel);
    x.col(c) = xc;
  }
  return x;
}

Mat solve_dense(const FiberContext& ctx, const Mat& rhs, const CellOptions& opt, double& residual) {
  const Index n = ctx.n(), z = ctx.zero_mode(), dim = ctx.dim();
  const Mat a = principal_matrix(ctx, RVec::Zero(ctx.d()));
  std::vector<Index> keep;
  for (Index i = 0; i < dim; ++i)
    if (i < z * n || i >= (z + 1) * n) keep.push_back(i);
  const Index r = static_cast<Index>(keep.size());
  Mat ar(r, r), br(r, rhs.cols());
  for (Index i = 0; i < r; ++i) {
    br.row(i) = rhs.row(keep[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < r; ++j) ar(i, j) = a(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]);
  }
  ar = hermitian_part(ar);
  Eigen::LLT<Mat> llt(ar);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::IllConditioned, "cell Galerkin matrix is not positive definite");
  const RVec diag = ar.diagonal().real();
  if (diag.maxCoeff() / diag.minCoeff() > opt.cond_cap)
    throw Error(ErrorCode::IllConditioned, "cell Galerkin matrix exceeds the condition cap");
  const Mat xr = llt.solve(br);
  residual = br.norm() > 0 ? (ar * xr - br).norm() / br.norm() : 0.0;
  Mat x = Mat::Zero(rhs.rows(), rhs.cols());
  for (Index i = 0; i < r; ++i) x.row(keep[static_cast<std::size_t>(i)]) = xr.row(i);
  return x;
}

// b(D) applied to mode coefficients with `cols` columns, returned as a grid field.
MatField apply_b(const FiberContext& ctx, const Mat& v) {
  const Index cnt = ctx.modes.count(), n = ctx.n(), m = ctx.m();
  Mat bv(cnt * m, v.cols());
  for (Index p = 0; p < cnt; ++p)
    bv.middleRows(p * m, m) = ctx.problem.symbol(ctx.xi[static_cast<std::size_t>(p)]) * v.middleRows(p * n, n);
  return synthesize(ctx.modes, ctx.grid, bv, m);
}

nlohmann::json to_json(const Mat& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json rr = nlohmann::json::array(), ri = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ri.push_back(m(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return {{"re", re}, {"im", im}};
}

}  // namespace

Mat CellSolution::LambdaG(const FiberContext& ctx) const {
  Mat out = Lambda;
  out.middleRows(ctx.zero_mode() * ctx.n(), ctx.n()) += LambdaG0;
  return out;
}

Mat CellSolution::LambdaTG(const FiberContext& ctx) const {
  Mat out = LambdaT;
  out.middleRows(ctx.zero_mode() * ctx.n(), ctx.n()) += LambdaTG0;
  return out;
}

CellSolution solve_cell_problems(const FiberContext& ctx, const CellOptions& opt) {
  const Index cnt = ctx.modes.count(), n = ctx.n(), m = ctx.m(), z = ctx.zero_mode();
  const Index pts = ctx.grid.size();
  Mat rhs_l = Mat::Zero(cnt * n, m), rhs_t = Mat::Zero(cnt * n, n);
  for (Index p = 0; p < cnt; ++p) {
    if (p == z) continue;
    const RVec& xp = ctx.xi[static_cast<std::size_t>(p)];
    rhs_l.middleRows(p * n, n) = -ctx.problem.symbol(xp).adjoint() * ctx.g_diff(p, z);
    for (int j = 0; j < static_cast<int>(ctx.gal_a.size()); ++j) {
      // coefficient of a_j^* at p is (coefficient of a_j at -p)^*
      const Mat a_minus_p = ctx.gal_a[static_cast<std::size_t>(j)].block(z * n, p * n, n, n);
      rhs_t.middleRows(p * n, n) -= xp(j) * a_minus_p.adjoint();
    }
  }
  CellSolution cs;
  cs.iterative = ctx.dim() - n > opt.dense_limit;
  Mat rhs(cnt * n, m + n);
  rhs << rhs_l, rhs_t;
  const Mat x = cs.iterative ? solve_cg(ctx, rhs, opt, cs.residual) : solve_dense(ctx, rhs, opt, cs.residual);
  cs.Lambda = x.leftCols(m);
  cs.LambdaT = x.rightCols(n);

  cs.Lambda_f = synthesize(ctx.modes, ctx.grid, cs.Lambda, n);
  cs.LambdaT_f = synthesize(ctx.modes, ctx.grid, cs.LambdaT, n);
  cs.bLambda = apply_b(ctx, cs.Lambda);
  cs.bLambdaT = apply_b(ctx, cs.LambdaT);
  cs.gtilde = ctx.g * (cs.bLambda + constant_field(Mat::Identity(m, m), pts));
  cs.g0 = cs.gtilde.mean();
  cs.V = (cs.bLambda.adjoint() * ctx.g * cs.bLambdaT).mean();
  cs.W = (cs.bLambdaT.adjoint() * ctx.g * cs.bLambdaT).mean();
  cs.Qbar = ctx.Q ? ctx.Q->mean() : Mat::Zero(n, n);
  cs.Gbar = ctx.G.mean();
  cs.f0 = inv_sqrt_hpd(hermitian_part(cs.Gbar));
  const Mat gbar_inv = inv_hpd(hermitian_part(cs.Gbar));
  cs.LambdaG0 = -gbar_inv * (ctx.G * cs.Lambda_f).mean();
  cs.LambdaTG0 = -gbar_inv * (ctx.G * cs.LambdaT_f).mean();
  cs.g_mean = ctx.g.mean();
  cs.g_harmonic = inv_hpd(hermitian_part(map_field(ctx.g, [](const Mat& v) { return inv_hpd(hermitian_part(v)); }).mean()));
  for (const MatField& aj : ctx.a) cs.a_sym.push_back((aj + aj.adjoint()).mean());
  cs.lambda = ctx.problem.lambda;
  return cs;
}

Mat effective_symbol(const FiberContext& ctx, const CellSolution& cell, const RVec& k, double eps) {
  const Index n = ctx.n();
  const Mat bk = ctx.problem.symbol(k);
  Mat l = bk.adjoint() * cell.g0 * bk - eps * (bk.adjoint() * cell.V + cell.V.adjoint() * bk);
  for (std::size_t j = 0; j < cell.a_sym.size(); ++j) l += eps * k(static_cast<Index>(j)) * cell.a_sym[j];
  l += eps * eps * (cell.Qbar - cell.W + cell.lambda * Mat::Identity(n, n));
  return hermitian_part(l);
}

Mat effective_operator(const FiberContext& ctx, const CellSolution& cell, const RVec& k, double eps) {
  return hermitian_part(cell.f0 * effective_symbol(ctx, cell, k, eps) * cell.f0);
}

std::string cell_json(const CellSolution& cell) {
  nlohmann::json j;
  j["g0"] = to_json(cell.g0);
  j["V"] = to_json(cell.V);
  j["W"] = to_json(cell.W);
  j["Qbar"] = to_json(cell.Qbar);
  j["f0"] = to_json(cell.f0);
  j["Lambda_G0"] = to_json(cell.LambdaG0);
  j["LambdaT_G0"] = to_json(cell.LambdaTG0);
  j["residual"] = cell.residual;
  return j.dump(2);
}

}  // namespace homog
