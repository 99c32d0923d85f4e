#include "homog/scalar.hpp"

#include "homog/errors.hpp"

#include <algorithm>
#include <cmath>

namespace homog {
namespace {

IVec grid_frequency(const Grid& g, Index i) {
  IVec r{0, 0, 0};
  for (int a = g.d - 1; a >= 0; --a) {
    const Index v = i % g.M;
    r[a] = static_cast<int>(v > g.M / 2 ? v - g.M : v);
    i /= g.M;
  }
  return r;
}

RVec to_rvec(const IVec& r, int d) {
  RVec x(d);
  for (int i = 0; i < d; ++i) x(i) = r[i];
  return x;
}

double mean_re(const Vec& u) { return u.mean().real(); }

Vec product(const Vec& a, const Vec& b) { return a.cwiseProduct(b); }

double imag_max(const Vec& u) { return u.imag().cwiseAbs().maxCoeff(); }

Vec scalar_samples(const CoefField& f, const Grid& g) { return f.sample(g).at(0, 0); }

}  // namespace

ScalarPotentials scalar_potentials(const ScalarInput& in, const ScalarBuildOptions& opt) {
  const int d = in.lattice.d;
  if (static_cast<int>(in.A.size()) != d) throw Error(ErrorCode::InvalidInput, "need one magnetic potential component per axis");
  ScalarPotentials out;
  out.grid.d = d;
  out.grid.M = opt.grid_points;
  const Grid& g = out.grid;
  const Vec v = scalar_samples(in.v, g);
  const Vec vh = dft(g, v);
  if (std::abs(vh(0)) > opt.mean_tol) throw Error(ErrorCode::MeanNotZero, "singular potential has mean " + std::to_string(std::abs(vh(0))));

  Vec ph = Vec::Zero(g.size());
  std::vector<Vec> zh(static_cast<std::size_t>(d), Vec::Zero(g.size()));
  for (Index i = 1; i < g.size(); ++i) {
    const IVec r = grid_frequency(g, i);
    const RVec xi = in.lattice.wavevector(to_rvec(r, d));
    ph(i) = -vh(i) / xi.squaredNorm();
    for (int j = 0; j < d; ++j) {
      // no derivative of the unpaired Nyquist mode
      if (2 * std::abs(r[j]) == g.M) continue;
      zh[static_cast<std::size_t>(j)](i) = -cplx(0.0, xi(j)) * ph(i);
    }
  }
  out.Phi = idft(g, ph);
  out.divergence_check = Vec::Zero(g.size());
  for (int j = 0; j < d; ++j) {
    out.zeta.push_back(idft(g, zh[static_cast<std::size_t>(j)]));
    Vec dz = zh[static_cast<std::size_t>(j)];
    for (Index i = 0; i < g.size(); ++i)
      dz(i) *= cplx(0.0, in.lattice.wavevector(to_rvec(grid_frequency(g, i), d))(j));
    out.divergence_check -= idft(g, dz);
  }

  const MatField gs = in.g.sample(g);
  std::vector<Vec> A;
  for (const CoefField& c : in.A) A.push_back(scalar_samples(c, g));
  out.Q = scalar_samples(in.Vcal, g);
  for (int j = 0; j < d; ++j) {
    Vec e = Vec::Zero(g.size());
    for (int l = 0; l < d; ++l) e += product(gs.at(j, l), A[static_cast<std::size_t>(l)]);
    out.Q += product(e, A[static_cast<std::size_t>(j)]);
    out.eta.push_back(e);
  }
  return out;
}

PeriodicProblem build_scalar_problem(const ScalarInput& in, const ScalarBuildOptions& opt) {
  const ScalarPotentials pot = scalar_potentials(in, opt);
  const int d = in.lattice.d;
  PeriodicProblem p;
  p.name = "scalar_schrodinger";
  p.lattice = in.lattice;
  p.n = 1;
  p.m = d;
  for (int j = 0; j < d; ++j) {
    Mat bj = Mat::Zero(d, 1);
    bj(j, 0) = 1.0;
    p.b.push_back(bj);
  }
  p.g = in.g;
  for (int j = 0; j < d; ++j) {
    MatField a(1, 1, pot.grid.size());
    a.at(0, 0) = -pot.eta[static_cast<std::size_t>(j)] + cplx(0.0, 1.0) * pot.zeta[static_cast<std::size_t>(j)];
    p.a.push_back(CoefField::from_samples(pot.grid, a));
  }
  MatField q(1, 1, pot.grid.size());
  q.at(0, 0) = pot.Q;
  p.Q = CoefField::from_samples(pot.grid, q);
  p.lambda = in.lambda;
  return p;
}

double ScalarEffective::symbol(const RVec& k, double eps) const {
  const RVec x = k - eps * A0;
  return x.dot(g0 * x) + eps * eps * (V0 + lambda);
}

ScalarEffective scalar_effective(const ScalarInput& in, int N, const ScalarBuildOptions& opt) {
  const int d = in.lattice.d;
  const ScalarPotentials pot = scalar_potentials(in, opt);
  ScalarEffective e;
  e.modes = make_modes(d, N);
  e.grid = grid_for(e.modes);
  e.lambda = in.lambda;
  const Grid& g = e.grid;
  const Index cnt = e.modes.count(), z = e.modes.zero();

  e.g = in.g.sample(g);
  MatField etaf(d, 1, g.size()), vf(1, 1, g.size()), qf(1, 1, g.size());
  for (int j = 0; j < d; ++j) etaf.at(j, 0) = pot.eta[static_cast<std::size_t>(j)];
  vf.at(0, 0) = scalar_samples(in.v, g);
  qf.at(0, 0) = pot.Q;
  etaf = resample(pot.grid, etaf, g);
  qf = resample(pot.grid, qf, g);
  for (int j = 0; j < d; ++j) e.eta.push_back(etaf.at(j, 0));
  e.v = vf.at(0, 0);
  e.Q = qf.at(0, 0);

  std::vector<RVec> xi;
  for (const IVec& p : e.modes.modes) xi.push_back(in.lattice.wavevector(to_rvec(p, d)));
  const MatCoeffs gh = dft(g, e.g);
  const MatCoeffs etah = dft(g, etaf);
  const MatCoeffs vh = dft(g, vf);

  // -div g grad on the nonzero modes
  std::vector<Index> nz;
  for (Index p = 0; p < cnt; ++p)
    if (p != z) nz.push_back(p);
  const Index dim = static_cast<Index>(nz.size());
  Mat K(dim, dim);
  for (Index a = 0; a < dim; ++a)
    for (Index b = 0; b < dim; ++b) {
      const Index p = nz[static_cast<std::size_t>(a)], q = nz[static_cast<std::size_t>(b)];
      const Mat gpq = gh.at(mode_diff(e.modes.modes[static_cast<std::size_t>(p)], e.modes.modes[static_cast<std::size_t>(q)]));
      K(a, b) = (xi[static_cast<std::size_t>(p)].transpose().cast<cplx>() * gpq * xi[static_cast<std::size_t>(q)].cast<cplx>())(0, 0);
    }
  const Eigen::LLT<Mat> llt(K);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::IllConditioned, "scalar cell matrix is not positive definite");

  Mat rhs(dim, d + 2);
  for (Index a = 0; a < dim; ++a) {
    const Index p = nz[static_cast<std::size_t>(a)];
    const IVec& mp = e.modes.modes[static_cast<std::size_t>(p)];
    const RVec& x = xi[static_cast<std::size_t>(p)];
    const Mat gp = gh.at(mp);
    const Mat ep = etah.at(mp);
    for (int j = 0; j < d; ++j) rhs(a, j) = cplx(0.0, 1.0) * (x.transpose().cast<cplx>() * gp.col(j))(0, 0);
    rhs(a, d) = -vh.at(mp)(0, 0);
    rhs(a, d + 1) = -cplx(0.0, 1.0) * (x.transpose().cast<cplx>() * ep)(0, 0);
  }
  const Mat sol = llt.solve(rhs);
  Mat coeffs = Mat::Zero(cnt, d + 2);
  for (Index a = 0; a < dim; ++a) coeffs.row(nz[static_cast<std::size_t>(a)]) = sol.row(a);
  e.Psi_c = coeffs.leftCols(d);
  e.LT1_c = coeffs.col(d);
  e.LT2_c = coeffs.col(d + 1);

  auto field = [&](const Vec& c) { return synthesize(e.modes, g, c, 1).at(0, 0); };
  auto gradient = [&](const Vec& c) {
    std::vector<Vec> out;
    for (int i = 0; i < d; ++i) {
      Vec dc(cnt);
      for (Index p = 0; p < cnt; ++p) dc(p) = cplx(0.0, xi[static_cast<std::size_t>(p)](i)) * c(p);
      out.push_back(field(dc));
    }
    return out;
  };
  for (int j = 0; j < d; ++j) {
    e.Psi.push_back(field(e.Psi_c.col(j)));
    e.grad_Psi.push_back(gradient(e.Psi_c.col(j)));
  }
  e.LT1 = field(e.LT1_c);
  e.LT2 = field(e.LT2_c);
  e.grad_LT1 = gradient(e.LT1_c);
  e.grad_LT2 = gradient(e.LT2_c);

  // g~ columns g (grad psi_l + e_l)
  e.gtilde = MatField(d, d, g.size());
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      Vec s = e.g.at(k, l);
      for (int i = 0; i < d; ++i) s += product(e.g.at(k, i), e.grad_Psi[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)]);
      e.gtilde.at(k, l) = s;
    }
  auto form = [&](const std::vector<Vec>& x, const std::vector<Vec>& y) {
    double s = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) s += mean_re(product(product(e.g.at(i, j), y[static_cast<std::size_t>(j)]), x[static_cast<std::size_t>(i)]));
    return s;
  };
  e.g0 = RMat(d, d);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) e.g0(k, l) = mean_re(e.gtilde.at(k, l));
  e.V1 = RVec(d);
  e.V2 = RVec(d);
  e.eta_mean = RVec(d);
  for (int j = 0; j < d; ++j) {
    e.V1(j) = form(e.grad_Psi[static_cast<std::size_t>(j)], e.grad_LT2);
    e.V2(j) = -form(e.grad_Psi[static_cast<std::size_t>(j)], e.grad_LT1);
    e.eta_mean(j) = mean_re(e.eta[static_cast<std::size_t>(j)]);
  }
  e.W = form(e.grad_LT1, e.grad_LT1) + form(e.grad_LT2, e.grad_LT2);
  e.Qbar = mean_re(e.Q);
  e.A0 = e.g0.ldlt().solve(e.V1 + e.eta_mean);
  double gAA = 0.0;
  for (int j = 0; j < d; ++j) gAA += mean_re(product(pot.eta[static_cast<std::size_t>(j)], scalar_samples(in.A[static_cast<std::size_t>(j)], pot.grid)));
  e.V0 = mean_re(scalar_samples(in.Vcal, pot.grid)) + gAA - e.A0.dot(e.g0 * e.A0) - e.W;

  double im = std::max(imag_max(e.LT1), imag_max(e.LT2));
  for (const Vec& p : e.Psi) im = std::max(im, imag_max(p));
  for (const Vec& x : e.gtilde.e) im = std::max(im, imag_max(x));
  e.imag_residual = im;
  return e;
}

double ScalarN::symbol(const RVec& k, double eps) const {
  return eps * k.dot(N12 * k) + eps * eps * N21.dot(k) + eps * eps * eps * N22;
}

ScalarN scalar_N_coefficients(const ScalarEffective& e) {
  const int d = e.modes.d;
  auto m = [](const Vec& a, const Vec& b) { return mean_re(product(a, b)); };
  auto m3 = [](const Vec& a, const Vec& b, const Vec& c) { return mean_re(product(product(a, b), c)); };
  auto eta_dot = [&](const std::vector<Vec>& grad) {
    Vec s = Vec::Zero(e.grid.size());
    for (int j = 0; j < d; ++j) s += product(e.eta[static_cast<std::size_t>(j)], grad[static_cast<std::size_t>(j)]);
    return s;
  };
  const Vec eta_LT1 = eta_dot(e.grad_LT1), eta_LT2 = eta_dot(e.grad_LT2);

  ScalarN out;
  out.N12_raw = RMat(d, d);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      double s = 2.0 * m(e.LT1, e.gtilde.at(k, l)) + m3(e.v, e.Psi[static_cast<std::size_t>(k)], e.Psi[static_cast<std::size_t>(l)]);
      for (int j = 0; j < d; ++j)
        s -= m(product(e.g.at(j, l), e.Psi[static_cast<std::size_t>(k)]) + product(e.g.at(j, k), e.Psi[static_cast<std::size_t>(l)]),
               e.grad_LT1[static_cast<std::size_t>(j)]);
      out.N12_raw(k, l) = s;
    }
  out.N12 = 0.5 * (out.N12_raw + out.N12_raw.transpose());
  out.N21 = RVec(d);
  for (int k = 0; k < d; ++k) {
    const std::size_t ks = static_cast<std::size_t>(k);
    double s = 0.0;
    for (int j = 0; j < d; ++j) {
      const std::size_t js = static_cast<std::size_t>(j);
      s += 2.0 * m(e.g.at(j, k), product(e.LT1, e.grad_LT2[js]) - product(e.LT2, e.grad_LT1[js]));
    }
    s += 2.0 * m(e.Psi[ks], eta_LT1) - 2.0 * m(e.LT1, eta_dot(e.grad_Psi[ks])) + 2.0 * m3(e.v, e.LT2, e.Psi[ks]) -
         4.0 * m(e.eta[ks], e.LT1);
    out.N21(k) = s;
  }
  const Vec Ql = e.Q + Vec::Constant(e.grid.size(), e.lambda);
  out.N22 = 2.0 * m(e.LT2, eta_LT1) - 2.0 * m(e.LT1, eta_LT2) +
            m(e.v, product(e.LT1, e.LT1) + product(e.LT2, e.LT2)) + 2.0 * m(e.LT1, Ql);
  return out;
}

Mat scalar_corrector_matrix(const ScalarEffective& e, const ScalarN& N, const BoxSetup& box, Index fiber, double s,
                            CorrectorVariant variant) {
  const Index cnt = e.modes.count(), z = e.modes.zero();
  if (box.fm->ctx.modes.count() != cnt || box.fm->ctx.n() != 1)
    throw Error(ErrorCode::InvalidInput, "box truncation differs from the scalar data");
  const double eps = box.eps, t = s / (eps * eps);
  const RVec& k = box.k[static_cast<std::size_t>(fiber)];
  const int d = e.modes.d;
  const Lattice& lat = box.fm->ctx.problem.lattice;

  // column acting on mode p: (Psi . grad + LambdaTilde) multiplied with the flow of mode p
  auto column = [&](Index p) {
    const RVec kp = k + lat.wavevector(to_rvec(e.modes.modes[static_cast<std::size_t>(p)], d));
    const double flow = std::exp(-e.symbol(kp, eps) * t);
    Vec c = Vec::Zero(cnt);
    for (Index q = 0; q < cnt; ++q) {
      const Index r = e.modes.index(mode_diff(e.modes.modes[static_cast<std::size_t>(q)], e.modes.modes[static_cast<std::size_t>(p)]));
      if (r < 0) continue;
      cplx v = eps * (e.LT1_c(r) + cplx(0.0, 1.0) * e.LT2_c(r));
      for (int j = 0; j < d; ++j) v += cplx(0.0, 1.0) * e.Psi_c(r, j) * kp(j);
      c(q) = v * flow;
    }
    return std::pair<Vec, double>(c, t * N.symbol(kp, eps) * flow);
  };

  Mat K = Mat::Zero(cnt, cnt);
  if (variant == CorrectorVariant::with_smoothing) {
    const auto [c, n] = column(z);
    K.col(z) += c;
    K.row(z) += c.adjoint();
    K(z, z) -= n;
    return K;
  }
  if (s < eps * eps) throw Error(ErrorCode::RegimeViolation, "corrector without smoothing needs s >= eps^2");
  for (Index p = 0; p < cnt; ++p) {
    const auto [c, n] = column(p);
    K.col(p) += c;
    K.row(p) += c.adjoint();
    K(p, p) -= n;
  }
  return K;
}

ScalarCrossCheck scalar_cross_check(const ScalarInput& in, int N, double eps, int cells, double s) {
  const ScalarEffective e = scalar_effective(in, N);
  const ScalarN sn = scalar_N_coefficients(e);
  const FiberModel fm = build_fiber_model(build_scalar_problem(in), N);
  const CellSolution& c = fm.cell;
  const int d = in.lattice.d;
  auto unit = [d](int i) {
    RVec x = RVec::Zero(d);
    x(i) = 1.0;
    return x;
  };
  ScalarCrossCheck r;

  const RMat g0 = c.g0.real();
  RVec V1(d), eta(d);
  for (int j = 0; j < d; ++j) {
    V1(j) = c.V(j, 0).real();
    eta(j) = -0.5 * c.a_sym[static_cast<std::size_t>(j)](0, 0).real();
  }
  const RVec A0 = g0.ldlt().solve(V1 + eta);
  const double V0 = c.Qbar(0, 0).real() - A0.dot(g0 * A0) - c.W(0, 0).real();
  r.effective = (g0 - e.g0).norm();
  for (int j = 0; j < d; ++j) r.effective = std::max(r.effective, std::abs(c.V(j, 0) - cplx(e.V1(j), e.V2(j))));
  r.effective = std::max({r.effective, std::abs(c.W(0, 0).real() - e.W), (A0 - e.A0).norm(), std::abs(V0 - e.V0)});

  // symmetric N12 recovered from the quadratic form by polarization
  for (int k = 0; k < d; ++k) {
    r.third_order = std::max(r.third_order, std::abs(fm.ng.N21(unit(k))(0, 0) - sn.N21(k)));
    r.third_order = std::max(r.third_order, fm.ng.N11(unit(k)).norm());
    for (int l = 0; l < d; ++l) {
      const double gen = k == l ? fm.ng.N12(unit(k))(0, 0).real()
                                : 0.5 * (fm.ng.N12(unit(k) + unit(l))(0, 0) - fm.ng.N12(unit(k))(0, 0) -
                                         fm.ng.N12(unit(l))(0, 0)).real();
      r.third_order = std::max(r.third_order, std::abs(gen - sn.N12(k, l)));
    }
  }
  r.third_order = std::max(r.third_order, std::abs(fm.ng.N22()(0, 0) - sn.N22));

  const BoxSetup box = make_box(fm, eps, cells);
  for (Index f = 0; f < box.fibers(); ++f) {
    const FiberPropagator prop(box, f);
    for (CorrectorVariant v : {CorrectorVariant::with_smoothing, CorrectorVariant::without_smoothing}) {
      const Mat a = prop.corrector_matrix(s, v);
      r.corrector = std::max(r.corrector, (a - scalar_corrector_matrix(e, sn, box, f, s, v)).norm() / std::max(1.0, a.norm()));
    }
  }
  return r;
}

ScalarInput preset_scalar_schrodinger(const ScalarPresetOptions& o) {
  if (o.d < 1 || o.d > 2) throw Error(ErrorCode::InvalidInput, "scalar preset supports d = 1 or 2");
  if (std::abs(o.g_amp) >= 1.5) throw Error(ErrorCode::InvalidInput, "metric amplitude must stay below 1.5");
  ScalarInput in;
  const int d = o.d;
  in.lattice = cubic_lattice(d);
  const double tp = 2.0 * M_PI;
  const double ga = o.g_amp;
  in.g = CoefField::closed_form(d, [d, ga, tp](const Point& y) {
    Mat m = Mat::Zero(d, d);
    m(0, 0) = 2.0 + ga * std::cos(tp * y[0]);
    if (d == 2) {
      m(1, 1) = 2.0 + ga * std::cos(tp * y[1]);
      m(0, 1) = m(1, 0) = 0.3 * ga * std::sin(tp * (y[0] + y[1]));
    }
    return m;
  });
  const double aa = o.A_amp;
  in.A.push_back(CoefField::closed_form(1, [aa, tp](const Point& y) {
    return Mat::Constant(1, 1, aa * (0.5 + std::sin(tp * y[0]) + (std::cos(tp * y[1]))));
  }));
  if (d == 2)
    in.A.push_back(CoefField::closed_form(1, [aa, tp](const Point& y) { return Mat::Constant(1, 1, aa * std::cos(tp * y[0])); }));
  const double va = o.v_amp;
  in.v = CoefField::closed_form(1, [va, tp, d](const Point& y) {
    return Mat::Constant(1, 1, va * (std::cos(tp * y[0]) + (d == 2 ? std::sin(tp * y[1]) : 0.0)));
  });
  const double Va = o.V_amp;
  in.Vcal = CoefField::closed_form(1, [Va, tp](const Point& y) { return Mat::Constant(1, 1, Va * (1.0 + std::cos(tp * (y[0] - y[1])))); });
  in.lambda = o.lambda;
  return in;
}

}  // namespace homog
