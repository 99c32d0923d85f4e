#include "homog/fiber.hpp"

#include "homog/errors.hpp"
#include "homog/parallel.hpp"

#include <cmath>
#include <limits>

namespace homog {
namespace {

Index diff_table_index(const ModeSet& ms, const IVec& r) {
  const int side = 4 * ms.N + 1;
  Index idx = 0;
  for (int i = 0; i < ms.d; ++i) idx = idx * side + (r[static_cast<std::size_t>(i)] + 2 * ms.N);
  return idx;
}

double sup_lambda_max(const MatField& f) {
  double best = -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < f.points(); ++k) {
    const HermEig e = herm_eig(hermitian_part(f.value(k)));
    best = std::max(best, e.values(e.size() - 1));
  }
  return best;
}

double inf_lambda_min(const MatField& f) {
  double best = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < f.points(); ++k) best = std::min(best, herm_eig(hermitian_part(f.value(k))).values(0));
  return best;
}

double inf_singular(const MatField& f) {
  double best = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < f.points(); ++k) {
    const RVec sv = Eigen::JacobiSVD<Mat>(f.value(k)).singularValues();
    best = std::min(best, sv(sv.size() - 1));
  }
  return best;
}

// Columns of `a` scaled per mode by w(p) (n columns per mode).
Mat scale_columns(const Mat& a, const RVec& w, Index n) {
  Mat out = a;
  for (Index p = 0; p < w.size(); ++p) out.middleCols(p * n, n) *= w(p);
  return out;
}

// block(p, q) = left(p)^* g^(p - q) right(q)
Mat sandwich_blocks(const FiberContext& ctx, const std::vector<Mat>& left, const std::vector<Mat>& right) {
  const Index cnt = ctx.modes.count(), n = ctx.n();
  Mat out(cnt * n, cnt * n);
  std::vector<Mat> lg(static_cast<std::size_t>(cnt));
  Mat tmp(ctx.m(), n);
  for (Index p = 0; p < cnt; ++p) {
    const Mat lp = left[static_cast<std::size_t>(p)].adjoint();
    for (Index q = 0; q < cnt; ++q) {
      tmp.noalias() = ctx.g_diff(p, q) * right[static_cast<std::size_t>(q)];
      out.block(p * n, q * n, n, n).noalias() = lp * tmp;
    }
  }
  return out;
}

}  // namespace

Mat FiberContext::constants_embedding() const {
  Mat e = Mat::Zero(dim(), n());
  e.block(zero_mode() * n(), 0, n(), n()).setIdentity();
  return e;
}

const Mat& FiberContext::g_diff(Index p, Index q) const {
  return g_hat[static_cast<std::size_t>(
      diff_table_index(modes, mode_diff(modes.modes[static_cast<std::size_t>(p)], modes.modes[static_cast<std::size_t>(q)])))];
}

FiberContext make_fiber_context(const PeriodicProblem& problem, int N, int grid_factor) {
  FiberContext ctx;
  ctx.problem = problem;
  ctx.modes = make_modes(problem.d(), N);
  ctx.grid = grid_for(ctx.modes, grid_factor);
  problem.validate(ctx.grid);
  const Index n = problem.n;
  const Index pts = ctx.grid.size();
  for (const IVec& p : ctx.modes.modes) {
    RVec pr(problem.d());
    for (int i = 0; i < problem.d(); ++i) pr(i) = p[static_cast<std::size_t>(i)];
    ctx.xi.push_back(problem.lattice.wavevector(pr));
  }

  ctx.g = problem.g.sample(ctx.grid);
  const MatCoeffs gc = dft(ctx.grid, ctx.g);
  const int side = 4 * N + 1;
  Index table = 1;
  for (int i = 0; i < problem.d(); ++i) table *= side;
  ctx.g_hat.resize(static_cast<std::size_t>(table));
  for (Index t = 0; t < table; ++t) {
    IVec r{0, 0, 0};
    Index rem = t;
    for (int i = problem.d() - 1; i >= 0; --i) {
      r[static_cast<std::size_t>(i)] = static_cast<int>(rem % side) - 2 * N;
      rem /= side;
    }
    ctx.g_hat[static_cast<std::size_t>(t)] = gc.at(r);
  }

  if (problem.f) {
    ctx.f = problem.f->sample(ctx.grid);
    ctx.G = map_field(*ctx.f, [](const Mat& v) { return inv_hpd(hermitian_part(v * v.adjoint())); });
    ctx.gal_G = hermitian_part(galerkin(ctx.modes, dft(ctx.grid, ctx.G)));
    ctx.M = inv_sqrt_hpd(ctx.gal_G);
  } else {
    ctx.G = constant_field(Mat::Identity(n, n), pts);
  }
  MatField aa = constant_field(Mat::Zero(n, n), pts);
  for (const CoefField& aj : problem.a) {
    ctx.a.push_back(aj.sample(ctx.grid));
    ctx.gal_a.push_back(galerkin(ctx.modes, dft(ctx.grid, ctx.a.back())));
    aa = aa + ctx.a.back() * ctx.a.back().adjoint();
  }
  if (problem.has_a()) ctx.gal_aa = hermitian_part(galerkin(ctx.modes, dft(ctx.grid, aa)));
  if (problem.Q) {
    ctx.Q = problem.Q->sample(ctx.grid);
    ctx.gal_Q = hermitian_part(galerkin(ctx.modes, dft(ctx.grid, *ctx.Q)));
  }
  return ctx;
}

Mat principal_matrix(const FiberContext& ctx, const RVec& k) {
  std::vector<Mat> bs;
  for (const RVec& x : ctx.xi) bs.push_back(ctx.problem.symbol(x + k));
  return sandwich_blocks(ctx, bs, bs);
}

Mat assemble_hatted(const FiberContext& ctx, const RVec& k, double eps) {
  Mat b = principal_matrix(ctx, k);
  const Index cnt = ctx.modes.count(), n = ctx.n();
  if (eps != 0.0) {
    for (int j = 0; j < static_cast<int>(ctx.gal_a.size()); ++j) {
      RVec w(cnt);
      for (Index p = 0; p < cnt; ++p) w(p) = ctx.xi[static_cast<std::size_t>(p)](j) + k(j);
      const Mat t = scale_columns(ctx.gal_a[static_cast<std::size_t>(j)], w, n);
      b += eps * (t + t.adjoint());
    }
    Mat lower = ctx.problem.lambda * Mat::Identity(b.rows(), b.cols());
    if (ctx.Q) lower += ctx.gal_Q;
    b += eps * eps * lower;
  }
  return hermitian_part(b);
}

Mat assemble_fiber(const FiberContext& ctx, const RVec& k, double eps, const AssembleOptions& opt) {
  Mat b = assemble_hatted(ctx, k, eps);
  if (ctx.weighted()) b = hermitian_part(ctx.M * b * ctx.M);
  if (opt.check_positivity) {
    const double defect = hermitian_defect(b);
    if (defect > opt.hermitian_tol) throw Error(ErrorCode::PositivityViolation, "fiber matrix is not Hermitian");
    if (k.squaredNorm() + eps * eps > 0.0) {
      Eigen::LLT<Mat> llt(b);
      if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::PositivityViolation, "fiber matrix is not positive definite");
    }
  }
  return b;
}

GramFamily hatted_gram(const FiberContext& ctx, const RVec& theta) {
  const Index cnt = ctx.modes.count(), n = ctx.n(), dim = ctx.dim();
  GramFamily gf;
  std::vector<Mat> b0, b1(static_cast<std::size_t>(cnt), ctx.problem.symbol(theta));
  for (const RVec& x : ctx.xi) b0.push_back(ctx.problem.symbol(x));
  gf.X0X0 = hermitian_part(sandwich_blocks(ctx, b0, b0));
  gf.X1X0 = sandwich_blocks(ctx, b1, b0);
  gf.X1X1 = hermitian_part(sandwich_blocks(ctx, b1, b1));

  RVec xi2(cnt), xth(cnt);
  for (Index p = 0; p < cnt; ++p) {
    xi2(p) = ctx.xi[static_cast<std::size_t>(p)].squaredNorm();
    xth(p) = ctx.xi[static_cast<std::size_t>(p)].dot(theta);
  }
  const Mat id = Mat::Identity(dim, dim);
  gf.Y0Y0 = scale_columns(id, xi2, n);
  gf.Y1Y0 = scale_columns(id, xth, n);
  gf.Y1Y1 = id;
  gf.Y2Y0 = Mat::Zero(dim, dim);
  gf.Y2Y1 = Mat::Zero(dim, dim);
  gf.Y2Y2 = Mat::Zero(dim, dim);
  for (int j = 0; j < static_cast<int>(ctx.gal_a.size()); ++j) {
    RVec w(cnt);
    for (Index p = 0; p < cnt; ++p) w(p) = ctx.xi[static_cast<std::size_t>(p)](j);
    gf.Y2Y0 += scale_columns(ctx.gal_a[static_cast<std::size_t>(j)], w, n);
    gf.Y2Y1 += theta(j) * ctx.gal_a[static_cast<std::size_t>(j)];
  }
  if (ctx.problem.has_a()) gf.Y2Y2 = ctx.gal_aa;
  gf.Q = ctx.Q ? ctx.gal_Q : Mat::Zero(dim, dim);
  gf.Q0 = id;
  gf.lambda = ctx.problem.lambda;
  gf.kappa = 1.0;
  gf.constants = to_form_constants(fiber_constants(ctx, true));
  return gf;
}

BorderedFamily bordered_gram(const FiberContext& ctx, const RVec& theta) {
  return BorderedFamily::make(hatted_gram(ctx, theta),
                              ctx.weighted() ? ctx.M : Mat(Mat::Identity(ctx.dim(), ctx.dim())));
}

AbstractFamily hatted_operators(const FiberContext& ctx, const RVec& theta) {
  const Index cnt = ctx.modes.count(), n = ctx.n(), m = ctx.m(), pts = ctx.grid.size();
  const int d = ctx.d();
  const double w = 1.0 / std::sqrt(static_cast<double>(pts));
  const MatField h = h_field(ctx.g);
  AbstractFamily f;
  f.X0 = Mat::Zero(pts * m, cnt * n);
  f.X1 = Mat::Zero(pts * m, cnt * n);
  f.Y0 = Mat::Zero(pts * n * d, cnt * n);
  f.Y1 = Mat::Zero(pts * n * d, cnt * n);
  f.Y2 = Mat::Zero(pts * n * d, cnt * n);
  const Mat bth = ctx.problem.symbol(theta);
  for (Index x = 0; x < pts; ++x) {
    const Point y = ctx.grid.point(x);
    const Mat hx = h.value(x);
    for (Index q = 0; q < cnt; ++q) {
      const IVec& pq = ctx.modes.modes[static_cast<std::size_t>(q)];
      const cplx e = w * std::polar(1.0, 2 * M_PI * (pq[0] * y[0] + pq[1] * y[1] + pq[2] * y[2]));
      f.X0.block(x * m, q * n, m, n) = e * hx * ctx.problem.symbol(ctx.xi[static_cast<std::size_t>(q)]);
      f.X1.block(x * m, q * n, m, n) = e * hx * bth;
      for (int j = 0; j < d; ++j) {
        const Index row = (x * d + j) * n;
        f.Y0.block(row, q * n, n, n) = e * ctx.xi[static_cast<std::size_t>(q)](j) * Mat::Identity(n, n);
        f.Y1.block(row, q * n, n, n) = e * theta(j) * Mat::Identity(n, n);
        if (ctx.problem.has_a()) f.Y2.block(row, q * n, n, n) = e * ctx.a[static_cast<std::size_t>(j)].value(x).adjoint();
      }
    }
  }
  f.Q = ctx.Q ? ctx.gal_Q : Mat::Zero(cnt * n, cnt * n);
  f.Q0 = Mat::Identity(cnt * n, cnt * n);
  f.lambda = ctx.problem.lambda;
  f.kappa = 1.0;
  f.constants = to_form_constants(fiber_constants(ctx, true));
  return f;
}

FiberConstants fiber_constants(const FiberContext& ctx, bool hatted) {
  FiberConstants c;
  const auto [lo, hi] = symbol_bounds(ctx.problem);
  c.alpha0 = lo;
  c.alpha1 = hi;
  c.g_norm = sup_lambda_max(ctx.g);
  c.ginv_norm = 1.0 / inf_lambda_min(ctx.g);
  if (ctx.f && !hatted) {
    c.f_norm = std::sqrt(1.0 / inf_lambda_min(ctx.G));
    c.finv_norm = 1.0 / inf_singular(*ctx.f);
  }
  for (const MatField& aj : ctx.a) c.a_sq_sum += std::pow(aj.sup_norm(), 2);
  if (ctx.Q) {
    c.Q_norm = ctx.Q->sup_norm();
    c.c0_hat = sup_lambda_max(scaled(*ctx.Q, -1.0));
  }
  const double f2 = c.f_norm * c.f_norm, finv2 = c.finv_norm * c.finv_norm;
  c.kappa = 1.0;
  c.c1 = std::sqrt(c.ginv_norm / c.alpha0);
  c.c2 = 0.0;
  c.c3 = f2 * c.Q_norm;
  c.c0 = c.c0_hat >= 0.0 ? c.c0_hat * f2 : c.c0_hat / finv2;
  c.C = c.a_sq_sum * f2;
  c.c4 = 4.0 / c.kappa * c.c1 * c.c1 * c.C;
  c.lambda = ctx.problem.lambda;
  c.beta = (c.lambda >= 0.0 ? c.lambda / finv2 : c.lambda * f2) - c.c0 - c.c4;
  c.cstar_hat = c.alpha0 / c.ginv_norm;
  c.cstar = c.cstar_hat / finv2;
  c.ccheck = 0.5 * std::min(c.kappa * c.cstar, 2.0 * c.beta);
  c.r0 = ctx.problem.lattice.r0;
  c.delta = 0.25 * c.kappa * c.cstar * c.r0 * c.r0;
  c.tau0 = std::sqrt(c.delta / ((2.0 + c.c1 * c.c1 + c.c2) * c.alpha1 * c.g_norm * f2 + c.C + c.c3 +
                                std::abs(c.lambda) * f2));
  return c;
}

FormConstants to_form_constants(const FiberConstants& c) {
  FormConstants f;
  f.c0 = c.c0;
  f.c1 = c.c1;
  f.c2 = c.c2;
  f.c3 = c.c3;
  f.c4 = c.c4;
  f.beta = c.beta;
  f.C1 = c.C;
  f.Cnu = c.C;
  f.estimated = true;
  return f;
}

ThresholdOptions threshold_options(const FiberConstants& c) {
  ThresholdOptions o;
  o.delta = c.delta;
  o.tau0 = c.tau0;
  o.cstar = c.cstar;
  o.estimate_constants = false;
  return o;
}

double admissible_lambda(const PeriodicProblem& problem, int N, double margin) {
  PeriodicProblem p = problem;
  p.lambda = 0.0;
  const FiberConstants c = fiber_constants(make_fiber_context(p, N));
  // beta = lambda / ||f^{-1}||^2 - c0 - c4 for lambda >= 0
  const double need = (c.c0 + c.c4 + margin) * c.finv_norm * c.finv_norm;
  if (need >= 0.0) return need;
  return (c.c0 + c.c4 + margin) / (c.f_norm * c.f_norm);
}

std::vector<RVec> brillouin_grid(const Lattice& lat, int per_axis) {
  std::vector<RVec> out;
  Index total = 1;
  for (int i = 0; i < lat.d; ++i) total *= per_axis;
  for (Index t = 0; t < total; ++t) {
    RVec r(lat.d);
    Index rem = t;
    for (int i = lat.d - 1; i >= 0; --i) {
      r(i) = (static_cast<double>(rem % per_axis) + 0.5) / per_axis - 0.5;
      rem /= per_axis;
    }
    out.push_back(lat.wavevector(lat.to_brillouin(r)));
  }
  return out;
}

double measured_lower_constant(const FiberContext& ctx, int per_axis, const std::vector<double>& eps_list,
                               int threads) {
  const std::vector<RVec> ks = brillouin_grid(ctx.problem.lattice, per_axis);
  std::vector<double> best(ks.size() * eps_list.size(), std::numeric_limits<double>::infinity());
  parallel_for(best.size(), threads, [&](std::size_t i) {
    const RVec& k = ks[i / eps_list.size()];
    const double eps = eps_list[i % eps_list.size()];
    AssembleOptions o;
    o.check_positivity = false;
    const Mat b = assemble_fiber(ctx, k, eps, o);
    best[i] = herm_eig(b).values(0) / (k.squaredNorm() + eps * eps);
  });
  return *std::min_element(best.begin(), best.end());
}

}  // namespace homog
