#include "homog/fourier.hpp"

#include "homog/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

namespace homog {
namespace {

// FFTW planning is not thread safe; execution of an existing plan on new
// arrays is. Plans are cached per shape and never destroyed.
std::mutex plan_mutex;
std::map<std::tuple<int, int, int>, fftw_plan> plans;

fftw_plan plan_for(const Grid& g, int sign) {
  std::lock_guard lock(plan_mutex);
  const auto key = std::make_tuple(g.d, g.M, sign);
  auto it = plans.find(key);
  if (it != plans.end()) return it->second;
  std::array<int, 3> n{g.M, g.M, g.M};
  const auto sz = static_cast<std::size_t>(g.size());
  auto* in = fftw_alloc_complex(sz);
  auto* out = fftw_alloc_complex(sz);
  fftw_plan p = fftw_plan_dft(g.d, n.data(), in, out, sign, FFTW_ESTIMATE);
  fftw_free(in);
  fftw_free(out);
  plans.emplace(key, p);
  return p;
}

Vec run(const Grid& g, const Vec& x, int sign) {
  if (x.size() != g.size()) throw Error(ErrorCode::InvalidInput, "grid data has wrong size");
  const auto sz = static_cast<std::size_t>(g.size());
  fftw_complex* in = fftw_alloc_complex(sz);
  fftw_complex* out = fftw_alloc_complex(sz);
  for (std::size_t i = 0; i < sz; ++i) {
    in[i][0] = x(static_cast<Index>(i)).real();
    in[i][1] = x(static_cast<Index>(i)).imag();
  }
  fftw_execute_dft(plan_for(g, sign), in, out);
  Vec y(g.size());
  for (std::size_t i = 0; i < sz; ++i) y(static_cast<Index>(i)) = cplx(out[i][0], out[i][1]);
  fftw_free(in);
  fftw_free(out);
  return y;
}

}  // namespace

Index ModeSet::index(const IVec& p) const {
  const int side = 2 * N + 1;
  Index idx = 0;
  for (int i = 0; i < d; ++i) {
    if (p[static_cast<std::size_t>(i)] < -N || p[static_cast<std::size_t>(i)] > N) return -1;
    idx = idx * side + (p[static_cast<std::size_t>(i)] + N);
  }
  return idx;
}

ModeSet make_modes(int d, int N) {
  if (d < 1 || d > 3 || N < 1) throw Error(ErrorCode::InvalidInput, "modes need d in {1,2,3} and N >= 1");
  ModeSet ms;
  ms.d = d;
  ms.N = N;
  const int side = 2 * N + 1;
  Index total = 1;
  for (int i = 0; i < d; ++i) total *= side;
  ms.modes.reserve(static_cast<std::size_t>(total));
  for (Index k = 0; k < total; ++k) {
    IVec p{0, 0, 0};
    Index rem = k;
    for (int i = d - 1; i >= 0; --i) {
      p[static_cast<std::size_t>(i)] = static_cast<int>(rem % side) - N;
      rem /= side;
    }
    ms.modes.push_back(p);
  }
  return ms;
}

Index Grid::size() const {
  Index s = 1;
  for (int i = 0; i < d; ++i) s *= M;
  return s;
}

std::array<double, 3> Grid::point(Index i) const {
  std::array<double, 3> y{0, 0, 0};
  for (int a = d - 1; a >= 0; --a) {
    y[static_cast<std::size_t>(a)] = static_cast<double>(i % M) / M;
    i /= M;
  }
  return y;
}

Index Grid::freq_index(const IVec& r) const {
  Index idx = 0;
  for (int i = 0; i < d; ++i) idx = idx * M + ((r[static_cast<std::size_t>(i)] % M) + M) % M;
  return idx;
}

Grid grid_for(const ModeSet& modes, int factor) {
  Grid g;
  g.d = modes.d;
  g.M = std::max(factor * modes.N, 2 * modes.N + 1);
  return g;
}

Vec dft(const Grid& g, const Vec& samples) {
  return run(g, samples, FFTW_FORWARD) / static_cast<double>(g.size());
}

Vec idft(const Grid& g, const Vec& coeffs) { return run(g, coeffs, FFTW_BACKWARD); }

MatField::MatField(Index r, Index c, Index points) : rows(r), cols(c) {
  e.assign(static_cast<std::size_t>(r * c), Vec::Zero(points));
}

Mat MatField::value(Index point) const {
  Mat v(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) v(i, j) = at(i, j)(point);
  return v;
}

void MatField::set(Index point, const Mat& v) {
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) at(i, j)(point) = v(i, j);
}

Mat MatField::mean() const {
  Mat v(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) v(i, j) = at(i, j).mean();
  return v;
}

MatField MatField::adjoint() const {
  MatField out(cols, rows, points());
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) out.at(j, i) = at(i, j).conjugate();
  return out;
}

double MatField::sup_norm() const {
  double best = 0.0;
  for (Index k = 0; k < points(); ++k) {
    const Mat v = value(k);
    best = std::max(best, v.size() == 1 ? std::abs(v(0, 0)) : Eigen::JacobiSVD<Mat>(v).singularValues()(0));
  }
  return best;
}

MatField operator*(const MatField& a, const MatField& b) {
  if (a.cols != b.rows || a.points() != b.points())
    throw Error(ErrorCode::InvalidInput, "field product shape mismatch");
  MatField out(a.rows, b.cols, a.points());
  for (Index i = 0; i < a.rows; ++i)
    for (Index j = 0; j < b.cols; ++j)
      for (Index k = 0; k < a.cols; ++k) out.at(i, j).array() += a.at(i, k).array() * b.at(k, j).array();
  return out;
}

MatField operator+(const MatField& a, const MatField& b) {
  MatField out = a;
  for (std::size_t k = 0; k < out.e.size(); ++k) out.e[k] += b.e[k];
  return out;
}

MatField operator-(const MatField& a, const MatField& b) {
  MatField out = a;
  for (std::size_t k = 0; k < out.e.size(); ++k) out.e[k] -= b.e[k];
  return out;
}

MatField scaled(const MatField& a, cplx s) {
  MatField out = a;
  for (auto& v : out.e) v *= s;
  return out;
}

MatField constant_field(const Mat& v, Index points) {
  MatField out(v.rows(), v.cols(), points);
  for (Index i = 0; i < v.rows(); ++i)
    for (Index j = 0; j < v.cols(); ++j) out.at(i, j).setConstant(v(i, j));
  return out;
}

MatField map_field(const MatField& a, const std::function<Mat(const Mat&)>& fn) {
  MatField out;
  for (Index k = 0; k < a.points(); ++k) {
    const Mat v = fn(a.value(k));
    if (k == 0) out = MatField(v.rows(), v.cols(), a.points());
    out.set(k, v);
  }
  return out;
}

Mat MatCoeffs::at(const IVec& r) const {
  const Index idx = grid.freq_index(r);
  Mat v(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) v(i, j) = e[static_cast<std::size_t>(i * cols + j)](idx);
  return v;
}

MatCoeffs dft(const Grid& g, const MatField& f) {
  MatCoeffs c;
  c.grid = g;
  c.rows = f.rows;
  c.cols = f.cols;
  for (const Vec& v : f.e) c.e.push_back(dft(g, v));
  return c;
}

IVec mode_diff(const IVec& p, const IVec& q) { return {p[0] - q[0], p[1] - q[1], p[2] - q[2]}; }

Mat galerkin(const ModeSet& modes, const MatCoeffs& c) {
  const Index cnt = modes.count();
  Mat out(cnt * c.rows, cnt * c.cols);
  for (Index p = 0; p < cnt; ++p)
    for (Index q = 0; q < cnt; ++q)
      out.block(p * c.rows, q * c.cols, c.rows, c.cols) =
          c.at(mode_diff(modes.modes[static_cast<std::size_t>(p)], modes.modes[static_cast<std::size_t>(q)]));
  return out;
}

Mat truncate(const ModeSet& modes, const MatCoeffs& c) {
  const Index cnt = modes.count();
  Mat out(cnt * c.rows, c.cols);
  for (Index p = 0; p < cnt; ++p) out.block(p * c.rows, 0, c.rows, c.cols) = c.at(modes.modes[static_cast<std::size_t>(p)]);
  return out;
}

MatField synthesize(const ModeSet& modes, const Grid& g, const Mat& coeffs, Index rows) {
  const Index cols = coeffs.cols();
  MatField out(rows, cols, g.size());
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      Vec full = Vec::Zero(g.size());
      for (Index p = 0; p < modes.count(); ++p)
        full(g.freq_index(modes.modes[static_cast<std::size_t>(p)])) += coeffs(p * rows + i, j);
      out.at(i, j) = idft(g, full);
    }
  return out;
}

}  // namespace homog
