#include "homog/fiber_analysis.hpp"

#include "homog/errors.hpp"

#include <cmath>

namespace homog {
namespace {

HermEig effective_eig(const FiberModel& fm, const RVec& k, double eps) {
  const Mat b0 = effective_operator(fm.ctx, fm.cell, k, eps);
  HermEig e = herm_eig(b0);
  if (k.squaredNorm() + eps * eps > 0.0 && !(e.values(0) > 0.0))
    throw Error(ErrorCode::NonPositiveEffective,
                "effective fiber operator has eigenvalue " + std::to_string(e.values(0)));
  return e;
}

double rel_err(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(1e-6, b.norm()); }

}  // namespace

FiberModel build_fiber_model(const PeriodicProblem& problem, int N, const CellOptions& opt, int grid_factor) {
  FiberModel fm;
  fm.ctx = make_fiber_context(problem, N, grid_factor);
  fm.cell = solve_cell_problems(fm.ctx, opt);
  fm.ng = ng_coefficients(fm.ctx, fm.cell);
  fm.constants = fiber_constants(fm.ctx);
  return fm;
}

Mat corrector_column(const FiberModel& fm, const RVec& k, double eps, double s) {
  const HermEig e = effective_eig(fm, k, eps);
  const Mat flow = fm.cell.f0 * heat(e, s) * fm.cell.f0;
  return (fm.cell.LambdaG(fm.ctx) * fm.ctx.problem.symbol(k) + eps * fm.cell.LambdaTG(fm.ctx)) * flow;
}

Mat corrector_integral(const FiberModel& fm, const RVec& k, double eps, double s) {
  const HermEig e = effective_eig(fm, k, eps);
  const Mat& f0 = fm.cell.f0;
  return f0 * sandwich_integral(e, f0 * fm.ng.at(k, eps) * f0, s) * f0;
}

Mat fiber_corrector(const FiberModel& fm, const RVec& k, double eps, double s) {
  const Mat col = corrector_column(fm, k, eps, s);
  const Mat pz = fm.ctx.constants_embedding();
  return col * pz.adjoint() + pz * col.adjoint() - pz * corrector_integral(fm, k, eps, s) * pz.adjoint();
}

Mat fiber_exponential(const FiberModel& fm, const RVec& k, double eps, double s) {
  AssembleOptions o;
  o.check_positivity = false;
  const Mat b = assemble_fiber(fm.ctx, k, eps, o);
  const Mat e = heat(b, s);
  return fm.ctx.weighted() ? Mat(fm.ctx.M * e * fm.ctx.M) : e;
}

Mat fiber_principal(const FiberModel& fm, const RVec& k, double eps, double s) {
  const HermEig e = effective_eig(fm, k, eps);
  const Mat pz = fm.ctx.constants_embedding();
  return pz * (fm.cell.f0 * heat(e, s) * fm.cell.f0) * pz.adjoint();
}

FiberRemainder fiber_remainder(const FiberModel& fm, const RVec& k, double eps, double s, double rate) {
  FiberRemainder r;
  const Mat diff = fiber_exponential(fm, k, eps, s) - fiber_principal(fm, k, eps, s);
  r.principal_error = op_norm(diff);
  r.remainder = op_norm(diff - fiber_corrector(fm, k, eps, s));
  const double rho2 = k.squaredNorm() + eps * eps;
  const double decay = std::exp(-rate * rho2 * s / 2.0);
  r.envelope_pos = s > 0.0 ? decay / s : std::numeric_limits<double>::infinity();
  r.envelope_nonneg = decay / (1.0 + s);
  r.ratio_pos = s > 0.0 ? r.remainder / r.envelope_pos : 0.0;
  r.ratio_nonneg = r.remainder / r.envelope_nonneg;
  r.in_regime = std::sqrt(rho2) <= fm.constants.tau0;
  return r;
}

bool CrossValidation::passed() const {
  return err_Z <= tolerance && err_Zt <= tolerance && err_ZG <= tolerance && err_germ <= tolerance &&
         err_L <= tolerance && err_N <= tolerance;
}

CrossValidation cross_validate_abstract(const FiberModel& fm, const RVec& theta_in, double t, double eps,
                                        double tol, bool throw_on_mismatch) {
  const FiberContext& ctx = fm.ctx;
  const RVec theta = theta_in.normalized();
  const BorderedFamily bf = bordered_gram(ctx, theta);
  const BorderedThreshold bt = bordered_threshold(bf, threshold_options(fiber_constants(ctx, true)));
  if (bt.hat.n() != ctx.n())
    throw Error(ErrorCode::MismatchBeyondTolerance, "kernel dimension " + std::to_string(bt.hat.n()) + " differs from n");
  const Mat pz = ctx.constants_embedding();
  const Mat pt = pz.adjoint();
  const Mat bth = ctx.problem.symbol(theta);
  const Mat& V = bt.V();

  CrossValidation cv;
  cv.tolerance = tol;
  cv.err_Z = rel_err(bt.hat.Z, fm.cell.Lambda * bth * pt);
  cv.err_Zt = rel_err(bt.hat.Ztilde, fm.cell.LambdaT * pt);
  cv.err_ZG = rel_err(bt.ZG, fm.cell.LambdaG(ctx) * bth * pt);
  cv.err_germ = rel_err(V * bt.hat.S * V.adjoint(), pz * (bth.adjoint() * fm.cell.g0 * bth) * pt);
  cv.err_L = rel_err(V * effective_L(bf.base, bt.hat, t, eps) * V.adjoint(),
                     pz * effective_symbol(ctx, fm.cell, t * theta, eps) * pt);
  cv.err_N = rel_err(bt.NG.at(t, eps), pz * fm.ng.at(t * theta, eps) * pt);

  if (throw_on_mismatch) {
    const std::pair<const char*, double> items[] = {{"Z", cv.err_Z},       {"Ztilde", cv.err_Zt}, {"Z_G", cv.err_ZG},
                                                    {"germ", cv.err_germ}, {"L", cv.err_L},       {"N_G", cv.err_N}};
    for (const auto& [name, err] : items)
      if (!(err <= tol))
        throw Error(ErrorCode::MismatchBeyondTolerance,
                    std::string(name) + " differs by " + std::to_string(err) + " (tolerance " + std::to_string(tol) + ")");
  }
  return cv;
}

}  // namespace homog
