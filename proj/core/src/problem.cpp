#include "homog/problem.hpp"

#include "homog/errors.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace homog {

MatField CoefField::sample(const Grid& g) const {
  if (fn) {
    MatField out(size, size, g.size());
    for (Index k = 0; k < g.size(); ++k) out.set(k, fn(g.point(k)));
    return out;
  }
  if (!samples) throw Error(ErrorCode::InvalidInput, "coefficient field has no data");
  return resample(sample_grid, *samples, g);
}

CoefField CoefField::constant(const Mat& v) {
  return closed_form(v.rows(), [v](const Point&) { return v; });
}

CoefField CoefField::closed_form(Index size, std::function<Mat(const Point&)> fn) {
  CoefField c;
  c.size = size;
  c.fn = std::move(fn);
  return c;
}

CoefField CoefField::from_samples(const Grid& g, MatField f) {
  if (f.rows != f.cols || f.points() != g.size())
    throw Error(ErrorCode::DataError, "grid field must be square and match its grid");
  CoefField c;
  c.size = f.rows;
  c.samples = std::move(f);
  c.sample_grid = g;
  return c;
}

MatField resample(const Grid& src, const MatField& f, const Grid& dst) {
  if (src.d != dst.d) throw Error(ErrorCode::InvalidInput, "grid dimension mismatch");
  if (src.M == dst.M) return f;
  MatField out(f.rows, f.cols, dst.size());
  for (std::size_t k = 0; k < f.e.size(); ++k) {
    const Vec c = dft(src, f.e[k]);
    Vec target = Vec::Zero(dst.size());
    for (Index i = 0; i < dst.size(); ++i) {
      // centered frequency of target index i
      IVec r{0, 0, 0};
      Index rem = i;
      bool ok = true;
      for (int a = dst.d - 1; a >= 0; --a) {
        int v = static_cast<int>(rem % dst.M);
        rem /= dst.M;
        if (v > dst.M / 2) v -= dst.M;
        if (2 * std::abs(v) >= src.M || 2 * std::abs(v) >= dst.M) ok = false;
        r[static_cast<std::size_t>(a)] = v;
      }
      if (ok) target(i) = c(src.freq_index(r));
    }
    out.e[k] = idft(dst, target);
  }
  return out;
}

Mat PeriodicProblem::symbol(const RVec& xi) const {
  Mat s = Mat::Zero(m, n);
  for (int j = 0; j < d(); ++j) s += b[static_cast<std::size_t>(j)] * xi(j);
  return s;
}

std::pair<double, double> symbol_bounds(const PeriodicProblem& p, int samples) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  auto visit = [&](RVec th) {
    th.normalize();
    const Mat s = p.symbol(th);
    const HermEig e = herm_eig(s.adjoint() * s);
    lo = std::min(lo, e.values(0));
    hi = std::max(hi, e.values(e.size() - 1));
  };
  const int d = p.d();
  for (int j = 0; j < d; ++j) visit(RVec::Unit(d, j));
  if (d == 1) return {lo, hi};
  for (int k = 0; k < samples; ++k) {
    RVec th(d);
    if (d == 2) {
      const double a = M_PI * k / samples;
      th << std::cos(a), std::sin(a);
    } else {
      for (int j = 0; j < d; ++j) th(j) = nd(rng);
    }
    visit(th);
  }
  return {lo, hi};
}

void PeriodicProblem::validate(const Grid& grid) const {
  const int dd = d();
  if (static_cast<int>(b.size()) != dd) throw Error(ErrorCode::InvalidInput, "need one b_j per axis");
  for (const Mat& bj : b)
    if (bj.rows() != m || bj.cols() != n) throw Error(ErrorCode::InvalidInput, "b_j must be m x n");
  if (m < n) throw Error(ErrorCode::InvalidInput, "need m >= n");
  if (g.size != m) throw Error(ErrorCode::InvalidInput, "g must be m x m");
  if (f && f->size != n) throw Error(ErrorCode::InvalidInput, "f must be n x n");
  if (Q && Q->size != n) throw Error(ErrorCode::InvalidInput, "Q must be n x n");
  if (!a.empty()) {
    if (static_cast<int>(a.size()) != dd) throw Error(ErrorCode::InvalidInput, "need one a_j per axis");
    for (const CoefField& aj : a)
      if (aj.size != n) throw Error(ErrorCode::InvalidInput, "a_j must be n x n");
  }
  const auto [lo, hi] = symbol_bounds(*this);
  if (!(lo > 1e-12 * std::max(hi, 1.0))) throw Error(ErrorCode::InvalidInput, "b(theta) loses rank n");

  const MatField gs = g.sample(grid);
  for (Index k = 0; k < grid.size(); ++k) {
    const Mat v = gs.value(k);
    if (hermitian_defect(v) > 1e-10) throw Error(ErrorCode::PositivityViolation, "g is not Hermitian");
    if (!(herm_eig(hermitian_part(v)).values(0) > 0.0))
      throw Error(ErrorCode::PositivityViolation, "g is not positive definite");
  }
  if (f) {
    const MatField fs = f->sample(grid);
    for (Index k = 0; k < grid.size(); ++k) {
      Eigen::JacobiSVD<Mat> svd(fs.value(k));
      const RVec sv = svd.singularValues();
      if (!(sv(sv.size() - 1) > 1e-12 * sv(0))) throw Error(ErrorCode::PositivityViolation, "f is singular");
    }
  }
  if (Q) {
    const MatField qs = Q->sample(grid);
    for (Index k = 0; k < grid.size(); ++k)
      if (hermitian_defect(qs.value(k)) > 1e-10) throw Error(ErrorCode::InvalidInput, "Q is not Hermitian");
  }
}

MatField h_field(const MatField& g) {
  return map_field(g, [](const Mat& v) { return sqrt_hpd(hermitian_part(v)); });
}

}  // namespace homog
