#include "homog/evolution.hpp"

#include "homog/errors.hpp"
#include "homog/parallel.hpp"

#include <cmath>
#include <memory>
#include <random>

namespace homog {
namespace {

double scaled_time(const BoxSetup& box, double s) { return s / (box.eps * box.eps); }

// integral over u in [a, b] of e^{-x (s - u)}
double segment_weight(double x, double a, double b, double s) {
  const double h = b - a;
  const double z = x * h;
  const double phi1 = std::abs(z) < 1e-8 ? 1.0 - 0.5 * z : -std::expm1(-z) / z;
  return std::exp(-x * (s - b)) * h * phi1;
}

Mat block_diag(const std::vector<Mat>& blocks) {
  Index rows = 0, cols = 0;
  for (const Mat& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Mat out = Mat::Zero(rows, cols);
  Index r = 0, c = 0;
  for (const Mat& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

Index centered(Index v, Index m) { return v > m / 2 ? v - m : v; }

}  // namespace

IVec BoxSetup::frequency(Index f, Index p) const {
  const IVec& mp = fm->ctx.modes.modes[static_cast<std::size_t>(p)];
  const IVec& r = residue[static_cast<std::size_t>(f)];
  const IVec& sh = shift[static_cast<std::size_t>(f)];
  IVec q{0, 0, 0};
  for (int i = 0; i < fm->ctx.d(); ++i) q[i] = cells * (mp[i] - sh[i]) + r[i];
  return q;
}

double BoxSetup::physical_frequency(Index f, Index p) const {
  return (fm->ctx.xi[static_cast<std::size_t>(p)] + k[static_cast<std::size_t>(f)]).norm() / eps;
}

BoxSetup make_box(const FiberModel& fm, double eps, int cells) {
  if (!(eps > 0.0) || cells < 1) throw Error(ErrorCode::InvalidInput, "box needs eps > 0 and at least one cell");
  const FiberContext& ctx = fm.ctx;
  BoxSetup box;
  box.fm = &fm;
  box.eps = eps;
  box.cells = cells;
  box.box_grid.d = ctx.d();
  box.box_grid.M = cells * std::max(ctx.grid.M, 2 * ctx.modes.N + 4);
  Index total = 1;
  for (int i = 0; i < ctx.d(); ++i) total *= cells;
  const Lattice& lat = ctx.problem.lattice;
  for (Index t = 0; t < total; ++t) {
    IVec r{0, 0, 0};
    Index rem = t;
    for (int i = ctx.d() - 1; i >= 0; --i) {
      r[i] = static_cast<int>(rem % cells);
      rem /= cells;
    }
    RVec frac(ctx.d());
    for (int i = 0; i < ctx.d(); ++i) frac(i) = static_cast<double>(r[i]) / cells;
    const RVec kred = lat.to_brillouin(frac);
    IVec sh{0, 0, 0};
    for (int i = 0; i < ctx.d(); ++i) sh[i] = static_cast<int>(std::lround(frac(i) - kred(i)));
    box.residue.push_back(r);
    box.shift.push_back(sh);
    box.k.push_back(lat.wavevector(kred));
  }
  const Index n = ctx.n();
  box.gal_LG = galerkin(ctx.modes, dft(ctx.grid, synthesize(ctx.modes, ctx.grid, fm.cell.LambdaG(ctx), n)));
  box.gal_LTG = galerkin(ctx.modes, dft(ctx.grid, synthesize(ctx.modes, ctx.grid, fm.cell.LambdaTG(ctx), n)));
  return box;
}

BoxSetup make_box_length(const FiberModel& fm, double eps, double length) {
  const double c = length / eps;
  const long cells = std::lround(c);
  if (cells < 1 || std::abs(c - static_cast<double>(cells)) > 1e-9 * c)
    throw Error(ErrorCode::InvalidInput, "box length must be an integer multiple of eps");
  return make_box(fm, eps, static_cast<int>(cells));
}

BlochField bloch_decompose(const BoxSetup& box, const MatField& u) {
  const Index n = box.fm->ctx.n(), cnt = box.fm->ctx.modes.count();
  if (u.rows != n || u.cols != 1 || u.points() != box.box_grid.size())
    throw Error(ErrorCode::InvalidInput, "box field must be n x 1 on the box grid");
  BlochField out(static_cast<std::size_t>(box.fibers()), Vec::Zero(cnt * n));
  for (Index c = 0; c < n; ++c) {
    const Vec coeffs = dft(box.box_grid, u.at(c, 0));
    for (Index f = 0; f < box.fibers(); ++f)
      for (Index p = 0; p < cnt; ++p)
        out[static_cast<std::size_t>(f)](p * n + c) = coeffs(box.box_grid.freq_index(box.frequency(f, p)));
  }
  return out;
}

MatField bloch_synthesize(const BoxSetup& box, const BlochField& b) {
  const Index n = box.fm->ctx.n(), cnt = box.fm->ctx.modes.count();
  MatField out(n, 1, box.box_grid.size());
  for (Index c = 0; c < n; ++c) {
    Vec full = Vec::Zero(box.box_grid.size());
    for (Index f = 0; f < box.fibers(); ++f)
      for (Index p = 0; p < cnt; ++p)
        full(box.box_grid.freq_index(box.frequency(f, p))) = b[static_cast<std::size_t>(f)](p * n + c);
    out.at(c, 0) = idft(box.box_grid, full);
  }
  return out;
}

double l2_norm(const BlochField& b) {
  double s = 0.0;
  for (const Vec& v : b) s += v.squaredNorm();
  return std::sqrt(s);
}

BlochField operator-(const BlochField& a, const BlochField& b) {
  BlochField out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

BlochField operator+(const BlochField& a, const BlochField& b) {
  BlochField out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

MatField smoothing_apply(const BoxSetup& box, const MatField& u) {
  const Grid& g = box.box_grid;
  const Lattice& lat = box.fm->ctx.problem.lattice;
  const int d = g.d;
  MatField out = u;
  for (auto& comp : out.e) {
    Vec c = dft(g, comp);
    for (Index i = 0; i < g.size(); ++i) {
      RVec frac(d);
      Index rem = i;
      for (int a = d - 1; a >= 0; --a) {
        frac(a) = static_cast<double>(centered(rem % g.M, g.M)) / box.cells;
        rem /= g.M;
      }
      if ((lat.to_brillouin(frac) - frac).norm() > 1e-12) c(i) = 0.0;
    }
    comp = idft(g, c);
  }
  return out;
}

BlochField smoothing_apply(const BoxSetup& box, const BlochField& u) {
  const Index n = box.fm->ctx.n(), z = box.fm->ctx.zero_mode();
  BlochField out = u;
  for (Vec& v : out) {
    const Vec keep = v.segment(z * n, n);
    v.setZero();
    v.segment(z * n, n) = keep;
  }
  return out;
}

// ---------------------------------------------------------------- propagators

FiberPropagator::FiberPropagator(const BoxSetup& box, Index fiber)
    : box_(&box), fiber_(fiber), k_(box.k[static_cast<std::size_t>(fiber)]) {
  const FiberModel& fm = *box.fm;
  AssembleOptions o;
  o.check_positivity = false;
  fine_ = herm_eig(assemble_fiber(fm.ctx, k_, box.eps, o));
  // the flow only needs B >= 0; a kernel appears at k = 0 when lambda = 0
  const double tol = 1e-12 * std::max(1.0, std::abs(fine_.values(fine_.values.size() - 1)));
  if (fine_.values(0) < -tol)
    throw Error(ErrorCode::PositivityViolation, "fiber matrix has eigenvalue " + std::to_string(fine_.values(0)));
  for (Index p = 0; p < fm.ctx.modes.count(); ++p) {
    const RVec kp = k_ + fm.ctx.xi[static_cast<std::size_t>(p)];
    hom_.push_back(herm_eig(effective_operator(fm.ctx, fm.cell, kp, box.eps)));
    const RVec& ev = hom_.back().values;
    if (ev(0) < -1e-12 * std::max(1.0, std::abs(ev(ev.size() - 1))))
      throw Error(ErrorCode::NonPositiveEffective,
                  "effective symbol has eigenvalue " + std::to_string(hom_.back().values(0)));
  }
}

Mat FiberPropagator::fine_matrix(double s) const {
  const Mat e = heat(fine_, scaled_time(*box_, s));
  const FiberContext& ctx = box_->fm->ctx;
  return ctx.weighted() ? Mat(ctx.M * e * ctx.M) : e;
}

Mat FiberPropagator::mode_flow(Index p, double s) const {
  const Mat& f0 = box_->fm->cell.f0;
  return f0 * heat(hom_[static_cast<std::size_t>(p)], scaled_time(*box_, s)) * f0;
}

Mat FiberPropagator::mode_integral(Index p, double s) const {
  const FiberModel& fm = *box_->fm;
  const Mat& f0 = fm.cell.f0;
  const RVec kp = k_ + fm.ctx.xi[static_cast<std::size_t>(p)];
  return f0 * sandwich_integral(hom_[static_cast<std::size_t>(p)], f0 * fm.ng.at(kp, box_->eps) * f0, scaled_time(*box_, s)) *
         f0;
}

Mat FiberPropagator::homogenized_matrix(double s) const {
  std::vector<Mat> blocks;
  for (Index p = 0; p < box_->fm->ctx.modes.count(); ++p) blocks.push_back(mode_flow(p, s));
  return block_diag(blocks);
}

Mat FiberPropagator::corrector_matrix(double s, CorrectorVariant v) const {
  const FiberModel& fm = *box_->fm;
  const FiberContext& ctx = fm.ctx;
  const Index n = ctx.n(), m = ctx.m(), cnt = ctx.modes.count();
  const double eps = box_->eps;
  if (v == CorrectorVariant::with_smoothing) {
    const Mat pz = ctx.constants_embedding();
    const Mat col = (fm.cell.LambdaG(ctx) * ctx.problem.symbol(k_) + eps * fm.cell.LambdaTG(ctx)) * mode_flow(ctx.zero_mode(), s);
    return col * pz.adjoint() + pz * col.adjoint() - pz * mode_integral(ctx.zero_mode(), s) * pz.adjoint();
  }
  if (s < eps * eps) throw Error(ErrorCode::RegimeViolation, "corrector without smoothing needs s >= eps^2");
  Mat col(cnt * n, cnt * n);
  std::vector<Mat> integrals;
  for (Index p = 0; p < cnt; ++p) {
    const Mat e = mode_flow(p, s);
    const Mat bp = ctx.problem.symbol(k_ + ctx.xi[static_cast<std::size_t>(p)]);
    col.middleCols(p * n, n) = box_->gal_LG.middleCols(p * m, m) * (bp * e) + eps * box_->gal_LTG.middleCols(p * n, n) * e;
    integrals.push_back(mode_integral(p, s));
  }
  return col + col.adjoint() - block_diag(integrals);
}

Vec FiberPropagator::fine(const Vec& phi, double s) const {
  const FiberContext& ctx = box_->fm->ctx;
  const double t = scaled_time(*box_, s);
  Vec x = ctx.weighted() ? Vec(ctx.M * phi) : phi;
  Vec c = fine_.vectors.adjoint() * x;
  for (Index i = 0; i < c.size(); ++i) c(i) *= std::exp(-fine_.values(i) * t);
  x = fine_.vectors * c;
  return ctx.weighted() ? Vec(ctx.M * x) : x;
}

Vec FiberPropagator::homogenized(const Vec& phi, double s) const {
  const Index n = box_->fm->ctx.n();
  Vec out(phi.size());
  for (Index p = 0; p < box_->fm->ctx.modes.count(); ++p) out.segment(p * n, n) = mode_flow(p, s) * phi.segment(p * n, n);
  return out;
}

Vec FiberPropagator::corrector(const Vec& phi, double s, CorrectorVariant v) const {
  if (v == CorrectorVariant::without_smoothing) return corrector_matrix(s, v) * phi;
  const FiberModel& fm = *box_->fm;
  const FiberContext& ctx = fm.ctx;
  const Index n = ctx.n(), z = ctx.zero_mode();
  const Mat col = (fm.cell.LambdaG(ctx) * ctx.problem.symbol(k_) + box_->eps * fm.cell.LambdaTG(ctx)) * mode_flow(z, s);
  Vec out = col * phi.segment(z * n, n);
  out.segment(z * n, n) += col.adjoint() * phi - mode_integral(z, s) * phi.segment(z * n, n);
  return out;
}

Vec FiberPropagator::fine_segment(const Vec& F, double a, double b, double s) const {
  const FiberContext& ctx = box_->fm->ctx;
  const double inv = 1.0 / (box_->eps * box_->eps);
  Vec x = ctx.weighted() ? Vec(ctx.M * F) : F;
  Vec c = fine_.vectors.adjoint() * x;
  for (Index i = 0; i < c.size(); ++i) c(i) *= segment_weight(fine_.values(i) * inv, a, b, s);
  x = fine_.vectors * c;
  return ctx.weighted() ? Vec(ctx.M * x) : x;
}

Vec FiberPropagator::homogenized_segment(const Vec& F, double a, double b, double s) const {
  const FiberModel& fm = *box_->fm;
  const Index n = fm.ctx.n();
  const double inv = 1.0 / (box_->eps * box_->eps);
  const Mat& f0 = fm.cell.f0;
  Vec out(F.size());
  for (Index p = 0; p < fm.ctx.modes.count(); ++p) {
    const HermEig& e = hom_[static_cast<std::size_t>(p)];
    Vec c = e.vectors.adjoint() * (f0 * F.segment(p * n, n));
    for (Index i = 0; i < c.size(); ++i) c(i) *= segment_weight(e.values(i) * inv, a, b, s);
    out.segment(p * n, n) = f0 * (e.vectors * c);
  }
  return out;
}

namespace {

BlochField map_fibers(const BoxSetup& box, const BlochField& phi, int threads,
                      const std::function<Vec(const FiberPropagator&, const Vec&)>& fn) {
  if (static_cast<Index>(phi.size()) != box.fibers()) throw Error(ErrorCode::InvalidInput, "fiber count mismatch");
  BlochField out(phi.size());
  parallel_for(phi.size(), threads, [&](std::size_t f) {
    const FiberPropagator prop(box, static_cast<Index>(f));
    out[f] = fn(prop, phi[f]);
  });
  return out;
}

}  // namespace

BlochField evolve_fine(const BoxSetup& box, const BlochField& phi, double s, int threads) {
  return map_fibers(box, phi, threads, [s](const FiberPropagator& p, const Vec& v) { return p.fine(v, s); });
}

BlochField evolve_homogenized(const BoxSetup& box, const BlochField& phi, double s, int threads) {
  return map_fibers(box, phi, threads, [s](const FiberPropagator& p, const Vec& v) { return p.homogenized(v, s); });
}

BlochField corrector_apply(const BoxSetup& box, const BlochField& phi, double s, CorrectorVariant v, int threads) {
  if (v == CorrectorVariant::without_smoothing && s < box.eps * box.eps)
    throw Error(ErrorCode::RegimeViolation, "corrector without smoothing needs s >= eps^2");
  return map_fibers(box, phi, threads, [s, v](const FiberPropagator& p, const Vec& x) { return p.corrector(x, s, v); });
}

// ---------------------------------------------------------------- sources

double source_rate_principal(double eps, double p) {
  if (p < 2.0) return std::pow(eps, 2.0 - 2.0 / p);
  if (p == 2.0) return eps * std::sqrt(1.0 + std::abs(std::log(eps)));
  return eps;
}

double source_rate_corrected(double eps, double p) {
  if (std::isinf(p)) return eps * eps * (1.0 + std::abs(std::log(eps)));
  const double pprime = p / (p - 1.0);
  return std::pow(eps, 2.0 / pprime);
}

SolutionPair duhamel_solve(const BoxSetup& box, const BlochField& phi, const Source& F, double s, double rate,
                           const DuhamelOptions& opt) {
  if (!(opt.p_norm > 1.0)) throw Error(ErrorCode::InvalidInput, "source exponent must exceed 1");
  if (opt.steps < 1) throw Error(ErrorCode::InvalidInput, "need at least one quadrature step");
  const std::size_t nf = static_cast<std::size_t>(box.fibers());
  std::vector<std::unique_ptr<FiberPropagator>> props(nf);
  parallel_for(nf, opt.threads, [&](std::size_t f) { props[f] = std::make_unique<FiberPropagator>(box, static_cast<Index>(f)); });

  SolutionPair out;
  out.source_corrector = opt.p_norm > 2.0;
  if (opt.variant == CorrectorVariant::without_smoothing && s < box.eps * box.eps)
    throw Error(ErrorCode::RegimeViolation, "corrector without smoothing needs s >= eps^2");
  out.u_eps.resize(nf);
  out.u0.resize(nf);
  out.corrector.resize(nf);
  parallel_for(nf, opt.threads, [&](std::size_t f) {
    out.u_eps[f] = props[f]->fine(phi[f], s);
    out.u0[f] = props[f]->homogenized(phi[f], s);
    out.corrector[f] = props[f]->corrector(phi[f], s, opt.variant);
  });

  struct Integrals {
    BlochField fine, hom, corr;
    double F_norm = 0.0;
  };
  auto run = [&](int steps) {
    Integrals I;
    const Index dim = box.fiber_dim();
    I.fine.assign(nf, Vec::Zero(dim));
    I.hom.assign(nf, Vec::Zero(dim));
    I.corr.assign(nf, Vec::Zero(dim));
    const double h = s / steps;
    double acc = 0.0;
    for (int j = 0; j < steps; ++j) {
      const double a = j * h, b = (j + 1) * h, u = a + 0.5 * h;
      const BlochField Fj = F(u);
      const double fn = l2_norm(Fj);
      acc = std::isinf(opt.p_norm) ? std::max(acc, fn) : acc + h * std::pow(fn, opt.p_norm);
      parallel_for(nf, opt.threads, [&](std::size_t f) {
        I.fine[f] += props[f]->fine_segment(Fj[f], a, b, s);
        I.hom[f] += props[f]->homogenized_segment(Fj[f], a, b, s);
        if (out.source_corrector) I.corr[f] += h * props[f]->corrector(Fj[f], s - u, CorrectorVariant::with_smoothing);
      });
    }
    I.F_norm = std::isinf(opt.p_norm) ? acc : std::pow(acc, 1.0 / opt.p_norm);
    return I;
  };
  const Integrals coarse = run(opt.steps);
  const Integrals fine = run(2 * opt.steps);
  auto change = [](const BlochField& a, const BlochField& b) {
    const double nb = l2_norm(b);
    return nb > 0.0 ? l2_norm(a - b) / nb : 0.0;
  };
  out.halving_change =
      std::max({change(coarse.fine, fine.fine), change(coarse.hom, fine.hom), change(coarse.corr, fine.corr)});
  if (out.halving_change > opt.tolerance)
    throw Error(ErrorCode::QuadratureUnderResolved,
                "step halving changed the source integrals by " + std::to_string(out.halving_change));
  out.u_eps = out.u_eps + fine.fine;
  out.u0 = out.u0 + fine.hom;
  if (out.source_corrector) out.corrector = out.corrector + fine.corr;

  out.phi_norm = l2_norm(phi);
  out.F_norm = fine.F_norm;
  const BlochField diff = out.u_eps - out.u0;
  out.err_principal = l2_norm(diff);
  out.err_corrected = l2_norm(diff - out.corrector);
  const double eps = box.eps, decay = std::exp(-rate * s / 2.0);
  out.envelope_principal = eps / std::sqrt(s + eps * eps) * decay * out.phi_norm +
                           source_rate_principal(eps, opt.p_norm) * out.F_norm;
  out.envelope_corrected =
      eps * eps / (s + eps * eps) * decay * out.phi_norm +
      (out.source_corrector ? source_rate_corrected(eps, opt.p_norm) : source_rate_principal(eps, opt.p_norm)) *
          out.F_norm;
  return out;
}

// ---------------------------------------------------------------- sweeps

namespace {

std::uint64_t mix(std::uint64_t h, std::int64_t v) {
  h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

}  // namespace

double sweep_rate(const FiberModel& fm, const SweepOptions& opt) {
  return opt.rate >= 0.0 ? opt.rate : std::max(0.0, measured_lower_constant(fm.ctx, 8, {0.05, 0.25, 1.0}, opt.threads));
}

SweepPoint sweep_point(const FiberModel& fm, double eps, double s, SweepMode mode, double rate,
                       const SweepOptions& opt) {
  if (!(eps > 0.0) || !(s > 0.0)) throw Error(ErrorCode::InvalidInput, "sweep point needs eps > 0 and s > 0");
  const Index n = fm.ctx.n(), cnt = fm.ctx.modes.count();
  const int probes = std::max(opt.probes, 1);
  // Each probe is a random wave packet: Gaussian envelope around a random centre in
  // the cutoff ball, a few box frequencies wide. Packets localize in frequency, so
  // the battery sees the per-frequency error instead of its average.
  const int d = fm.ctx.d();
  const double width = 2.0 * 2.0 * M_PI / opt.box_length;
  std::vector<RVec> centres;
  {
    std::mt19937_64 rng(mix(opt.seed, -1));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    while (static_cast<int>(centres.size()) < probes) {
      RVec c(d);
      for (int i = 0; i < d; ++i) c(i) = opt.probe_cutoff * u(rng);
      if (c.norm() <= opt.probe_cutoff) centres.push_back(c);
    }
  }

  const BoxSetup box = make_box_length(fm, eps, opt.box_length);
  const std::size_t nf = static_cast<std::size_t>(box.fibers());
  std::vector<double> errp(nf), errc(nf);
  std::vector<std::vector<double>> nump(nf), numc(nf), den(nf);
  parallel_for(nf, opt.threads, [&](std::size_t f) {
    const FiberPropagator prop(box, static_cast<Index>(f));
    const Mat d = prop.fine_matrix(s) - prop.homogenized_matrix(s);
    const Mat dc = d - prop.corrector_matrix(s, opt.variant);
    errp[f] = op_norm(d);
    errc[f] = op_norm(dc);
    nump[f].assign(static_cast<std::size_t>(probes), 0.0);
    numc[f].assign(static_cast<std::size_t>(probes), 0.0);
    den[f].assign(static_cast<std::size_t>(probes), 0.0);
    std::vector<Index> active;
    for (Index p = 0; p < cnt; ++p)
      if (box.physical_frequency(static_cast<Index>(f), p) <= opt.probe_cutoff) active.push_back(p);
    if (active.empty()) return;
    for (int i = 0; i < probes; ++i) {
      const RVec& centre = centres[static_cast<std::size_t>(i)];
      Vec phi = Vec::Zero(cnt * n);
      for (Index p : active) {
        const RVec x = (fm.ctx.xi[static_cast<std::size_t>(p)] + box.k[f]) / eps;
        const double env = std::exp(-0.5 * (x - centre).squaredNorm() / (width * width));
        if (env < 1e-8) continue;
        // seeded by the box frequency, which fixes the physical frequency across eps
        const IVec q = box.frequency(static_cast<Index>(f), p);
        std::mt19937_64 rng(mix(mix(mix(mix(opt.seed, i), q[0]), q[1]), q[2]));
        std::normal_distribution<double> nd;
        for (Index c = 0; c < n; ++c) phi(p * n + c) = env * cplx(nd(rng), nd(rng));
      }
      nump[f][static_cast<std::size_t>(i)] = (d * phi).squaredNorm();
      numc[f][static_cast<std::size_t>(i)] = (dc * phi).squaredNorm();
      den[f][static_cast<std::size_t>(i)] = phi.squaredNorm();
    }
  });
  SweepPoint pt;
  pt.eps = eps;
  pt.s = s;
  pt.fibers = static_cast<Index>(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    pt.err_principal = std::max(pt.err_principal, errp[f]);
    pt.err_corrected = std::max(pt.err_corrected, errc[f]);
  }
  for (int i = 0; i < probes; ++i) {
    double a = 0, b = 0, c = 0;
    for (std::size_t f = 0; f < nf; ++f) {
      a += nump[f][static_cast<std::size_t>(i)];
      b += numc[f][static_cast<std::size_t>(i)];
      c += den[f][static_cast<std::size_t>(i)];
    }
    if (c > 0) {
      pt.proxy_principal = std::max(pt.proxy_principal, std::sqrt(a / c));
      pt.proxy_corrected = std::max(pt.proxy_corrected, std::sqrt(b / c));
    }
  }
  const double decay = std::exp(-rate * s / 2.0);
  pt.envelope_principal = eps / std::sqrt(s + eps * eps) * decay;
  pt.envelope_corrected = eps * eps / (s + eps * eps) * decay;
  const double exact = mode == SweepMode::principal ? pt.err_principal : pt.err_corrected;
  const double proxy = mode == SweepMode::principal ? pt.proxy_principal : pt.proxy_corrected;
  pt.proxy_disagrees = exact > opt.floor && exact > 2.0 * proxy;
  return pt;
}

SweepReport convergence_sweep(const FiberModel& fm, const std::vector<double>& eps_list, double s, SweepMode mode,
                              const SweepOptions& opt) {
  if (eps_list.size() < 3) throw Error(ErrorCode::InsufficientDecades, "sweep needs at least three eps values");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1])) throw Error(ErrorCode::InvalidInput, "eps values must decrease");
  SweepReport rep;
  rep.mode = mode;
  rep.rate = sweep_rate(fm, opt);
  for (double eps : eps_list) rep.points.push_back(sweep_point(fm, eps, s, mode, rep.rate, opt));
  std::vector<std::pair<double, double>> sp, sc;
  for (const SweepPoint& p : rep.points) {
    sp.emplace_back(p.eps, p.err_principal);
    sc.emplace_back(p.eps, p.err_corrected);
  }
  rep.principal = fit_rate(sp, opt.floor);
  rep.corrected = fit_rate(sc, opt.floor);
  return rep;
}

}  // namespace homog
