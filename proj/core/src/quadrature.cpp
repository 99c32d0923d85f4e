#include "homog/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace homog {
namespace {

constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a, b;
  Mat value;
  double err;
  bool operator<(const Piece& o) const { return err < o.err; }
};

Piece rule(const std::function<Mat(double)>& f, double a, double b, int& evals) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  Mat fc = f(c);
  Mat k = kKronrod[7] * fc;
  Mat g = kGauss[3] * fc;
  for (int i = 0; i < 7; ++i) {
    Mat s = f(c - h * kNodes[i]) + f(c + h * kNodes[i]);
    k += kKronrod[i] * s;
    if (i % 2 == 1) g += kGauss[i / 2] * s;
  }
  evals += 15;
  k *= h;
  g *= h;
  return {a, b, k, (k - g).norm()};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<Mat(double)>& f, double a, double b,
                                    double abs_tol, double rel_tol, int max_intervals) {
  QuadratureResult out;
  if (b <= a) {
    Mat z = f(a);
    out.value = Mat::Zero(z.rows(), z.cols());
    return out;
  }
  std::priority_queue<Piece> heap;
  Piece first = rule(f, a, b, out.evaluations);
  Mat total = first.value;
  double err = first.err;
  heap.push(std::move(first));
  while (static_cast<int>(heap.size()) < max_intervals &&
         err > std::max(abs_tol, rel_tol * total.norm())) {
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Piece l = rule(f, worst.a, mid, out.evaluations);
    Piece r = rule(f, mid, worst.b, out.evaluations);
    total += l.value + r.value - worst.value;
    err += l.err + r.err - worst.err;
    heap.push(std::move(l));
    heap.push(std::move(r));
  }
  // Re-sum to shed accumulated cancellation in the running total.
  total.setZero();
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().err;
    heap.pop();
  }
  out.value = std::move(total);
  out.error_estimate = err;
  return out;
}

}  // namespace homog
