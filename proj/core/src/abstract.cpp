#include "homog/abstract.hpp"

#include "homog/errors.hpp"
#include "homog/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace homog {
namespace {

double lambda_max(const Mat& a) { return herm_eig(a).values.maxCoeff(); }
double lambda_min(const Mat& a) { return herm_eig(a).values.minCoeff(); }

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidInput, what);
}

// Sample points for t: 0, a symmetric log-spaced set around `scale`.
std::vector<double> t_grid(double scale, int samples) {
  std::vector<double> ts{0.0};
  const int half = std::max(1, (samples - 1) / 2);
  for (int j = 0; j < half; ++j) {
    const double e = -3.0 + 6.0 * j / std::max(1, half - 1);
    const double t = scale * std::pow(10.0, e);
    ts.push_back(t);
    ts.push_back(-t);
  }
  return ts;
}

Mat random_complex(std::mt19937_64& rng, Index rows, Index cols, double scale) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = scale * cplx(nd(rng), nd(rng)) / std::sqrt(2.0);
  return m;
}

Mat herm(const Mat& a) { return a + a.adjoint(); }

}  // namespace

void AbstractFamily::validate() const {
  const Index h = dim_H();
  require(h > 0, "empty family");
  require(X1.rows() == X0.rows() && X1.cols() == h, "X1 shape");
  require(Y1.rows() == Y0.rows() && Y0.cols() == h && Y1.cols() == h, "Y0/Y1 shape");
  require(Y2.rows() == Y0.rows() && Y2.cols() == h, "Y2 shape");
  require(Q.rows() == h && Q.cols() == h, "Q shape");
  require(Q0.rows() == h && Q0.cols() == h, "Q0 shape");
  require(hermitian_defect(Q) < 1e-12, "Q not Hermitian");
  require(hermitian_defect(Q0) < 1e-12, "Q0 not Hermitian");
  require(lambda_min(Q0) > 0.0, "Q0 not positive definite");
  require(kappa > 0.0 && kappa <= 1.0, "kappa outside (0, 1]");
}

GramFamily GramFamily::from(const AbstractFamily& f) {
  f.validate();
  GramFamily g;
  g.X0X0 = f.X0.adjoint() * f.X0;
  g.X1X0 = f.X1.adjoint() * f.X0;
  g.X1X1 = f.X1.adjoint() * f.X1;
  g.Y0Y0 = f.Y0.adjoint() * f.Y0;
  g.Y1Y0 = f.Y1.adjoint() * f.Y0;
  g.Y1Y1 = f.Y1.adjoint() * f.Y1;
  g.Y2Y0 = f.Y2.adjoint() * f.Y0;
  g.Y2Y1 = f.Y2.adjoint() * f.Y1;
  g.Y2Y2 = f.Y2.adjoint() * f.Y2;
  g.Q = hermitian_part(f.Q);
  g.Q0 = hermitian_part(f.Q0);
  g.lambda = f.lambda;
  g.kappa = f.kappa;
  g.constants = f.constants;
  return g;
}

Mat GramFamily::A(double t) const {
  return X0X0 + t * herm(X1X0) + t * t * X1X1;
}

Mat GramFamily::YtYt(double t) const {
  return Y0Y0 + t * herm(Y1Y0) + t * t * Y1Y1;
}

Mat GramFamily::B(double t, double eps) const {
  const Mat y2y = Y2Y0 + t * Y2Y1;
  return A(t) + eps * herm(y2y) + eps * eps * (Q + lambda * Q0);
}

GramFamily GramFamily::conjugated(const Mat& m) const {
  GramFamily g = *this;
  auto conj = [&](const Mat& a) { return Mat(m.adjoint() * a * m); };
  g.X0X0 = hermitian_part(conj(X0X0));
  g.X1X0 = conj(X1X0);
  g.X1X1 = hermitian_part(conj(X1X1));
  g.Y0Y0 = hermitian_part(conj(Y0Y0));
  g.Y1Y0 = conj(Y1Y0);
  g.Y1Y1 = hermitian_part(conj(Y1Y1));
  g.Y2Y0 = conj(Y2Y0);
  g.Y2Y1 = conj(Y2Y1);
  g.Y2Y2 = hermitian_part(conj(Y2Y2));
  g.Q = hermitian_part(conj(Q));
  g.Q0 = hermitian_part(conj(Q0));
  g.constants = {};
  return g;
}

double beta_from(const FormConstants& c, double lambda, const Mat& q0) {
  const HermEig e = herm_eig(q0);
  if (lambda >= 0.0) return lambda * e.values.minCoeff() - c.c0 - c.c4;
  return lambda * e.values.maxCoeff() - c.c0 - c.c4;
}

FormConstants estimate_form_constants(const GramFamily& g, const FormConstantOptions& opt) {
  FormConstants c;
  const double x0 = std::max(lambda_max(g.X0X0), 1e-300);
  const double x1 = std::max(lambda_max(g.X1X1), 1e-300);
  const std::vector<double> ts = t_grid(std::sqrt(x0 / x1), opt.t_samples);

  double c1sq = 0.0;
  double c0 = -std::numeric_limits<double>::infinity();
  std::vector<Mat> a_cache;
  a_cache.reserve(ts.size());
  for (double t : ts) {
    const Mat a = g.A(t);
    const HermEig ea = herm_eig(a);
    const Mat yy = hermitian_part(g.YtYt(t));
    const double amax = std::max(ea.values.maxCoeff(), 1e-300);
    std::vector<Index> rng_idx, ker_idx;
    for (Index i = 0; i < ea.size(); ++i)
      (ea.values(i) > 1e-12 * amax ? rng_idx : ker_idx).push_back(i);
    if (!ker_idx.empty()) {
      Mat uk(a.rows(), static_cast<Index>(ker_idx.size()));
      for (std::size_t j = 0; j < ker_idx.size(); ++j) uk.col(j) = ea.vectors.col(ker_idx[j]);
      const double leak = (uk.adjoint() * yy * uk).norm();
      if (leak > 1e-9 * std::max(1.0, yy.norm())) c1sq = std::numeric_limits<double>::infinity();
    }
    if (!rng_idx.empty()) {
      Mat ur(a.rows(), static_cast<Index>(rng_idx.size()));
      RVec w(static_cast<Index>(rng_idx.size()));
      for (std::size_t j = 0; j < rng_idx.size(); ++j) {
        ur.col(j) = ea.vectors.col(rng_idx[j]);
        w(j) = 1.0 / std::sqrt(ea.values(rng_idx[j]));
      }
      const Mat r = w.cast<cplx>().asDiagonal() * (ur.adjoint() * yy * ur) * w.cast<cplx>().asDiagonal();
      c1sq = std::max(c1sq, lambda_max(r));
    }
    c0 = std::max(c0, lambda_max(-g.Q - (1.0 - g.kappa) * a));
    a_cache.push_back(a);
  }

  c.c1 = opt.inflation * std::sqrt(std::max(c1sq, 0.0));
  c.c0 = c0 + (opt.inflation - 1.0) * std::abs(c0);
  c.c2 = 0.0;
  c.c3 = op_norm(g.Q);

  auto C_of = [&](double nu) {
    double best = 0.0;
    for (const Mat& a : a_cache) best = std::max(best, lambda_max(g.Y2Y2 - nu * a));
    return opt.inflation * best;
  };
  c.C1 = C_of(1.0);
  if (c.c1 > 0.0 && std::isfinite(c.c1)) {
    const double nu = g.kappa * g.kappa / (16.0 * c.c1 * c.c1);
    c.Cnu = C_of(nu);
    c.c4 = 4.0 / g.kappa * c.c1 * c.c1 * c.Cnu;
  } else if (c.c1 == 0.0) {
    c.Cnu = 0.0;
    c.c4 = 0.0;
  } else {
    c.Cnu = std::numeric_limits<double>::infinity();
    c.c4 = std::numeric_limits<double>::infinity();
  }
  c.beta = beta_from(c, g.lambda, g.Q0);
  c.estimated = true;
  return c;
}

KernelInfo kernel_projection(const Mat& x0, double rel_tol) {
  const Index h = x0.cols();
  Eigen::BDCSVD<Mat> svd(x0, Eigen::ComputeFullV);
  const RVec& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  Index r = 0;
  while (r < sv.size() && sv(r) > rel_tol * smax && sv(r) > 0.0) ++r;
  KernelInfo k;
  k.n = h - r;
  if (k.n == 0) throw Error(ErrorCode::DegenerateKernel, "X0 is injective");
  const Mat& v = svd.matrixV();
  k.basis = v.rightCols(k.n);
  k.P = k.basis * k.basis.adjoint();
  k.range_basis = v.leftCols(r);
  k.range_values = sv.head(r).array().square();
  k.d0 = r > 0 ? k.range_values(r - 1) : 0.0;
  return k;
}

KernelInfo kernel_projection_gram(const Mat& x0x0, double rel_tol) {
  const HermEig e = herm_eig(x0x0);
  const double emax = std::max(e.values.cwiseAbs().maxCoeff(), 0.0);
  Index nk = 0;
  while (nk < e.size() && e.values(nk) <= rel_tol * emax) ++nk;
  KernelInfo k;
  k.n = nk;
  if (nk == 0) throw Error(ErrorCode::DegenerateKernel, "X0^*X0 has no kernel");
  k.basis = e.vectors.leftCols(nk);
  k.P = k.basis * k.basis.adjoint();
  k.range_basis = e.vectors.rightCols(e.size() - nk);
  k.range_values = e.values.tail(e.size() - nk);
  k.d0 = k.range_values.size() ? k.range_values(0) : 0.0;
  return k;
}

Mat restricted_pinv(const KernelInfo& k, double cond_cap) {
  if (k.range_values.size() == 0) return Mat::Zero(k.P.rows(), k.P.cols());
  const double lo = k.range_values.minCoeff();
  const double hi = k.range_values.maxCoeff();
  if (hi / lo > cond_cap)
    throw Error(ErrorCode::IllConditioned,
                "restricted Gram condition number " + std::to_string(hi / lo));
  const RVec inv = k.range_values.cwiseInverse();
  return k.range_basis * inv.cast<cplx>().asDiagonal() * k.range_basis.adjoint();
}

Mat solve_Z(const GramFamily& g, const KernelInfo& k, double cond_cap) {
  return -restricted_pinv(k, cond_cap) * g.X1X0.adjoint() * k.P;
}

Mat solve_Ztilde(const GramFamily& g, const KernelInfo& k, double cond_cap) {
  return -restricted_pinv(k, cond_cap) * g.Y2Y0.adjoint() * k.P;
}

Mat ThresholdData::lift(const Mat& m) const { return basis() * m * basis().adjoint(); }

namespace {

ThresholdData finish_threshold(const GramFamily& g, KernelInfo kernel, const ThresholdOptions& opt) {
  ThresholdData td;
  restricted_pinv(kernel, opt.cond_cap);  // condition check only
  td.kernel = std::move(kernel);
  const Mat& b = td.basis();
  // pinv * M * P through the rank-n factor P = b b^*, never forming D x D products
  const Mat& rb = td.kernel.range_basis;
  const Vec inv = td.kernel.range_values.cwiseInverse().cast<cplx>();
  auto apply = [&](const Mat& m) -> Mat {
    const Mat mb = m.adjoint() * b;
    const Mat c = inv.asDiagonal() * (rb.adjoint() * mb);
    return -(rb * c) * b.adjoint();
  };
  td.Z = apply(g.X1X0);
  td.Ztilde = apply(g.Y2Y0);
  td.S = hermitian_part(b.adjoint() * (g.X1X1 * b) + (b.adjoint() * g.X1X0) * (td.Z * b));

  if (g.constants.estimated || !opt.estimate_constants) {
    td.constants = g.constants;
  } else {
    td.constants = estimate_form_constants(g);
  }
  const FormConstants& c = td.constants;
  td.delta = opt.delta.value_or(g.kappa * td.kernel.d0 / 14.0);
  if (opt.tau0) {
    td.tau0 = *opt.tau0;
  } else {
    const double x1 = lambda_max(g.X1X1);
    const double denom = (2.0 + c.c1 * c.c1 + c.c2) * x1 + c.C1 + c.c3 +
                         std::abs(g.lambda) * lambda_max(g.Q0);
    td.tau0 = denom > 0.0 ? std::sqrt(td.delta / denom) : std::sqrt(td.delta);
  }
  if (opt.cstar) {
    td.cstar = *opt.cstar;
  } else {
    double best = std::numeric_limits<double>::infinity();
    const int m = std::max(2, opt.cstar_samples);
    for (int j = 1; j <= m; ++j) {
      // geometric spacing toward 0 resolves the t -> 0 limit
      const double t = td.tau0 * std::pow(1e-4, static_cast<double>(m - j) / (m - 1));
      best = std::min(best, lambda_min(g.A(t)) / (t * t));
      best = std::min(best, lambda_min(g.A(-t)) / (t * t));
    }
    td.cstar = best;
  }
  td.cstar_check = 0.5 * std::min(g.kappa * td.cstar, 2.0 * c.beta);
  return td;
}

}  // namespace

ThresholdData threshold(const GramFamily& g, const ThresholdOptions& opt) {
  return finish_threshold(g, kernel_projection_gram(g.X0X0, opt.kernel_rel_tol), opt);
}

ThresholdData threshold(const AbstractFamily& f, const ThresholdOptions& opt) {
  const GramFamily g = GramFamily::from(f);
  ThresholdData td = finish_threshold(g, kernel_projection(f.X0, opt.kernel_rel_tol), opt);
  td.R = Mat(f.X1 * td.P() + f.X0 * td.Z);
  return td;
}

Mat germ(const GramFamily& g, const ThresholdData& td, double theta1, double theta2) {
  // Z = Z P, so every block is taken through the n-column factors Z b, Z~ b
  const Mat& b = td.basis();
  const Mat zb = td.Z * b;
  const Mat ztb = td.Ztilde * b;
  const Mat x0zb = g.X0X0 * zb;
  const Mat x0ztb = g.X0X0 * ztb;
  const Mat mixed = -(zb.adjoint() * x0ztb) - (ztb.adjoint() * x0zb) + b.adjoint() * (g.Y2Y1 * b) +
                    (b.adjoint() * g.Y2Y1.adjoint()) * b;
  const Mat second = -(ztb.adjoint() * x0ztb) + b.adjoint() * ((g.Q + g.lambda * g.Q0) * b);
  return hermitian_part(Mat(theta1 * theta1 * td.S + theta1 * theta2 * mixed + theta2 * theta2 * second));
}

Mat effective_L(const GramFamily& g, const ThresholdData& td, double t, double eps) {
  // tau^2 S(theta) is a quadratic form in (t, eps); evaluate it directly.
  return germ(g, td, t, eps);
}

Mat NParts::at(double t, double eps) const {
  return t * t * t * N11 + t * t * eps * N12 + t * eps * eps * N21 + eps * eps * eps * N22;
}

NParts n_parts(const GramFamily& g, const Mat& P, const Mat& Z, const Mat& Zt) {
  const Mat& X11 = g.X1X1;
  const Mat& X10 = g.X1X0;
  const Mat X01 = X10.adjoint();
  const Mat& Y20 = g.Y2Y0;
  const Mat Y02 = Y20.adjoint();
  const Mat& Y21 = g.Y2Y1;
  const Mat Y12 = Y21.adjoint();
  const Mat Zh = Z.adjoint();
  const Mat Zth = Zt.adjoint();
  const Mat RP = X11 * P + X10 * Z;  // X1^* applied to R P

  NParts np;
  np.N11 = herm(Zh * RP);
  np.N12 = herm(Zth * RP) + herm(Zh * X10 * Zt) + herm(Zh * Y20 * Z) + herm(Zh * Y21 * P) +
           herm(P * Y21 * Z);
  np.N21 = herm(Zth * X01 * Zt) + herm(Zh * Y20 * Zt) + herm(Zth * Y20 * Z) + herm(Zth * Y21 * P) +
           herm(Zth * Y12 * P) + herm(Zh * g.Q * P) + g.lambda * herm(Zh * g.Q0 * P);
  np.N22 = herm(Zth * Y02 * Zt) + herm(Zth * g.Q * P) + g.lambda * herm(Zth * g.Q0 * P);
  return np;
}

NParts n_parts_on_kernel(const GramFamily& g, const Mat& b, const Mat& zb, const Mat& ztb) {
  // Each term L^* M R with L, R in {P, Z, Z~} equals b (Lb^* M Rb) b^*: only n-column
  // products are formed, then lifted.
  auto sq = [](const Mat& c) -> Mat { return c + c.adjoint(); };
  auto lift = [&](const Mat& c) -> Mat { return b * c * b.adjoint(); };
  const Mat y20zb = g.Y2Y0 * zb, y20ztb = g.Y2Y0 * ztb, y21b = g.Y2Y1 * b;
  const Mat rpb = g.X1X1 * b + g.X1X0 * zb;  // X1^* R P, right factor b
  const Mat x01ztb = g.X1X0.adjoint() * ztb;
  const Mat y12b = g.Y2Y1.adjoint() * b;
  const Mat qb = g.Q * b, q0b = g.Q0 * b;
  const Mat zh = zb.adjoint(), zth = ztb.adjoint(), bh = b.adjoint();

  NParts np;
  np.N11 = lift(sq(zh * rpb));
  np.N12 = lift(sq(zth * rpb) + sq(zh * (g.X1X0 * ztb)) + sq(zh * y20zb) + sq(zh * y21b) +
                sq((bh * g.Y2Y1) * zb));
  np.N21 = lift(sq(zth * x01ztb) + sq(zh * y20ztb) + sq(zth * y20zb) + sq(zth * y21b) + sq(zth * y12b) +
                sq(zh * qb) + g.lambda * sq(zh * q0b));
  np.N22 = lift(sq(zth * (g.Y2Y0.adjoint() * ztb)) + sq(zth * qb) + g.lambda * sq(zth * q0b));
  return np;
}

NParts n_parts(const GramFamily& g, const ThresholdData& td) {
  const Mat& b = td.basis();
  return n_parts_on_kernel(g, b, td.Z * b, td.Ztilde * b);
}

Mat n_operator(const GramFamily& g, const ThresholdData& td, double t, double eps) {
  return n_parts(g, td).at(t, eps);
}

Mat corrector_K(const GramFamily& g, const ThresholdData& td, double t, double eps, double s,
                const CorrectorOptions& opt) {
  const Mat& b = td.basis();
  const HermEig l = herm_eig(effective_L(g, td, t, eps));
  const double tau2 = t * t + eps * eps;
  if (opt.check_positivity && l.size() > 0) {
    const double floor = td.cstar_check * tau2;
    const double slack = opt.positivity_tol * std::max(1.0, l.values.cwiseAbs().maxCoeff());
    if (l.values.minCoeff() < floor - slack)
      throw Error(ErrorCode::NonPositiveL, "min eig L = " + std::to_string(l.values.minCoeff()) +
                                               " below " + std::to_string(floor));
  }
  const Mat e = b * heat(l, s) * b.adjoint();
  const Mat zz = t * td.Z + eps * td.Ztilde;
  const Mat n = b.adjoint() * n_operator(g, td, t, eps) * b;
  const Mat k = zz * e + e * zz.adjoint() - b * sandwich_integral(l, n, s) * b.adjoint();
  return k;
}

RemainderReport exponential_remainder(const GramFamily& g, const ThresholdData& td, double t,
                                      double eps, double s, bool enforce_ball) {
  RemainderReport rep;
  rep.tau = std::sqrt(t * t + eps * eps);
  if (enforce_ball && rep.tau > td.tau0)
    throw Error(ErrorCode::OutsideThresholdBall,
                "tau = " + std::to_string(rep.tau) + " > tau0 = " + std::to_string(td.tau0));
  CorrectorOptions copt;
  copt.check_positivity = enforce_ball;
  const Mat& b = td.basis();
  const Mat principal = b * heat(effective_L(g, td, t, eps), s) * b.adjoint();
  const Mat r = heat(g.B(t, eps), s) - principal - corrector_K(g, td, t, eps, s, copt);
  rep.remainder_norm = op_norm(r);
  const double decay = std::exp(-td.cstar_check * rep.tau * rep.tau * s / 2.0);
  rep.bound_s_pos = s > 0.0 ? decay / s : std::numeric_limits<double>::infinity();
  rep.bound_s_nonneg = decay / (s + 1.0);
  return rep;
}

ProjectorReport threshold_projector_checks(const GramFamily& g, const ThresholdData& td, double tau,
                                           double theta1, double theta2) {
  ProjectorReport rep;
  const Mat& P = td.P();
  Mat F;
  if (tau == 0.0) {
    F = P;
    rep.rank = td.n();
  } else {
    const HermEig e = herm_eig(g.B(tau * theta1, tau * theta2));
    Index r = 0;
    while (r < e.size() && e.values(r) <= td.delta) ++r;
    rep.rank = r;
    if (r != td.n())
      throw Error(ErrorCode::RankMismatch,
                  "rank F = " + std::to_string(r) + ", n = " + std::to_string(td.n()));
    F = e.vectors.leftCols(r) * e.vectors.leftCols(r).adjoint();
  }
  const Mat F1 = theta1 * (td.Z + td.Z.adjoint()) + theta2 * (td.Ztilde + td.Ztilde.adjoint());
  rep.norm_F_minus_P = op_norm(F - P);
  rep.norm_F_minus_P_F1 = op_norm(F - P - tau * F1);

  const Mat Sth = td.lift(germ(g, td, theta1, theta2));
  const Mat BF = g.B(tau * theta1, tau * theta2) * F;
  const Mat K0 = theta1 * (td.Z * Sth + Sth * td.Z.adjoint()) +
                 theta2 * (td.Ztilde * Sth + Sth * td.Ztilde.adjoint());
  const Mat K = K0 + n_operator(g, td, theta1, theta2);
  rep.norm_BF_minus_SP = op_norm(BF - tau * tau * Sth);
  rep.norm_BF_minus_SP_K = op_norm(BF - tau * tau * Sth - tau * tau * tau * K);
  return rep;
}

MDecompositionReport m_decomposition_check(const GramFamily& g, const ThresholdData& td, double tau,
                                           double theta1, double theta2, double s,
                                           double cluster_tol) {
  MDecompositionReport rep;
  const Mat& b = td.basis();
  const Mat Sth = germ(g, td, theta1, theta2);
  const Mat Nth = hermitian_part(b.adjoint() * n_operator(g, td, theta1, theta2) * b);
  const HermEig es = herm_eig(Sth);
  const Index n = es.size();
  rep.gamma = es.values;

  // Rotate inside clusters of equal germ eigenvalues so N is diagonal there.
  Mat w = es.vectors;
  std::vector<int> cluster(static_cast<std::size_t>(n), 0);
  int cid = 0;
  for (Index i = 0; i < n;) {
    Index j = i + 1;
    while (j < n && std::abs(es.values(j) - es.values(j - 1)) <=
                        cluster_tol * std::max(std::abs(es.values(j)), std::abs(es.values(j - 1))))
      ++j;
    if (j - i > 1) {
      rep.degenerate_pair = true;
      const Mat wc = w.middleCols(i, j - i);
      const HermEig ec = herm_eig(wc.adjoint() * Nth * wc);
      w.middleCols(i, j - i) = wc * ec.vectors;
    }
    for (Index k = i; k < j; ++k) cluster[static_cast<std::size_t>(k)] = cid;
    ++cid;
    i = j;
  }
  rep.basis = w;
  const Mat nt = w.adjoint() * Nth * w;
  rep.mu = nt.diagonal().real();
  Mat nstar = nt;
  nstar.diagonal().setZero();
  rep.nstar_norm = op_norm(nstar);

  const double t2 = tau * tau;
  Mat closed = Mat::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    closed(k, k) = rep.mu(k) * s * std::exp(-t2 * rep.gamma(k) * s);
    for (Index j = 0; j < n; ++j) {
      if (j == k || cluster[static_cast<std::size_t>(j)] == cluster[static_cast<std::size_t>(k)])
        continue;
      closed(k, j) = nt(k, j) * duhamel_weight(t2 * rep.gamma(k), t2 * rep.gamma(j), s, 0.0);
    }
  }
  rep.closed_form = w * closed * w.adjoint();

  const QuadratureResult q = integrate_adaptive(
      [&](double u) { return Mat(heat(es, t2 * (s - u)) * Nth * heat(es, t2 * u)); }, 0.0, s,
      1e-14, 1e-13);
  rep.quadrature_error_estimate = q.error_estimate;
  rep.closed_vs_quadrature = op_norm(rep.closed_form - q.value);
  return rep;
}

AbstractFamily random_family(std::mt19937_64& rng, const RandomFamilySpec& spec) {
  const Index h = spec.dim;
  const Index hs = spec.dim_star > 0 ? spec.dim_star : h + 2;
  const Index ht = spec.dim_tilde > 0 ? spec.dim_tilde : h;
  require(spec.n >= 1 && spec.n < h, "kernel dimension must lie in [1, dim)");
  const double sc = 1.0 / std::sqrt(static_cast<double>(h));

  AbstractFamily f;
  const Mat kernel = orth(random_complex(rng, h, spec.n, 1.0));
  const Mat comp = Mat::Identity(h, h) - kernel * kernel.adjoint();
  f.X0 = random_complex(rng, hs, h, 1.0) * comp;
  f.X1 = random_complex(rng, hs, h, sc);
  const Mat w = random_complex(rng, ht, hs, 0.5 * sc);
  f.Y0 = w * f.X0;
  f.Y1 = w * f.X1;
  f.Y2 = random_complex(rng, ht, h, 0.5 * sc);
  f.Q = hermitian_part(random_complex(rng, h, h, 0.5 * sc));
  const Mat r = random_complex(rng, h, h, 0.3 * sc);
  f.Q0 = Mat::Identity(h, h) + r.adjoint() * r;
  f.kappa = 1.0;
  f.lambda = 0.0;

  GramFamily g = GramFamily::from(f);
  FormConstants c = estimate_form_constants(g);
  const double q0min = lambda_min(f.Q0);
  f.lambda = std::max(0.0, (c.c0 + c.c4) / q0min) + spec.margin;
  c.beta = beta_from(c, f.lambda, f.Q0);
  f.constants = c;
  return f;
}

AbstractFamily direct_sum(const AbstractFamily& a, const AbstractFamily& b) {
  require(a.lambda == b.lambda && a.kappa == b.kappa, "direct sum needs equal lambda and kappa");
  auto blk = [](const Mat& x, const Mat& y) {
    Mat m = Mat::Zero(x.rows() + y.rows(), x.cols() + y.cols());
    m.topLeftCorner(x.rows(), x.cols()) = x;
    m.bottomRightCorner(y.rows(), y.cols()) = y;
    return m;
  };
  AbstractFamily f;
  f.X0 = blk(a.X0, b.X0);
  f.X1 = blk(a.X1, b.X1);
  f.Y0 = blk(a.Y0, b.Y0);
  f.Y1 = blk(a.Y1, b.Y1);
  f.Y2 = blk(a.Y2, b.Y2);
  f.Q = blk(a.Q, b.Q);
  f.Q0 = blk(a.Q0, b.Q0);
  f.lambda = a.lambda;
  f.kappa = a.kappa;
  GramFamily g = GramFamily::from(f);
  f.constants = estimate_form_constants(g);
  return f;
}

ConstantsCheck check_constants(const GramFamily& g, std::mt19937_64& rng, int samples) {
  ConstantsCheck out;
  out.min_form_over_beta = std::numeric_limits<double>::infinity();
  const FormConstants& c = g.constants;
  std::uniform_real_distribution<double> ut(-3.0, 3.0), ue(0.05, 1.0);
  for (int i = 0; i < samples; ++i) {
    const Vec u = random_complex(rng, g.dim(), 1, 1.0).col(0);
    const double t = ut(rng);
    const double eps = ue(rng);
    const double xu = std::real(u.dot(g.A(t) * u));
    const double yu = std::real(u.dot(g.YtYt(t) * u));
    if (c.c1 > 0.0 && xu > 0.0) out.max_Y_over_X = std::max(out.max_Y_over_X, std::sqrt(yu / xu) / c.c1);
    const double bu = std::real(u.dot(g.B(t, eps) * u));
    if (c.beta > 0.0)
      out.min_form_over_beta =
          std::min(out.min_form_over_beta, bu / (c.beta * eps * eps * u.squaredNorm()));
  }
  return out;
}

}  // namespace homog
