#include "homog/presets.hpp"

#include "homog/errors.hpp"

#include <cmath>
#include <random>

namespace homog {
namespace {

Mat scalar(cplx v) {
  Mat m(1, 1);
  m(0, 0) = v;
  return m;
}

double phase(const Point& y, const IVec& k) {
  return 2.0 * M_PI * (k[0] * y[0] + k[1] * y[1] + k[2] * y[2]);
}

// Sum over harmonics of C_k e^{i 2 pi k.y} + C_k^* e^{-i 2 pi k.y}: Hermitian when C_k is
// used with its adjoint, so callers get a Hermitian field for any C_k.
struct Harmonic {
  IVec k;
  Mat c;
};

std::vector<Harmonic> random_harmonics(std::mt19937_64& rng, int d, Index size, int count, double total,
                                       bool hermitian) {
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> freq(-2, 2);
  std::vector<Harmonic> out;
  for (int h = 0; h < count; ++h) {
    IVec k{0, 0, 0};
    do {
      for (int i = 0; i < d; ++i) k[static_cast<std::size_t>(i)] = freq(rng);
    } while (k[0] == 0 && k[1] == 0 && k[2] == 0);
    Mat c(size, size);
    for (Index i = 0; i < size; ++i)
      for (Index j = 0; j < size; ++j) c(i, j) = cplx(nd(rng), nd(rng));
    if (hermitian) c = 0.5 * (c + c.adjoint());
    out.push_back({k, c});
  }
  double norm = 0.0;
  for (const auto& h : out) norm += 2.0 * op_norm(h.c);
  for (auto& h : out) h.c *= total / norm;
  return out;
}

std::function<Mat(const Point&)> harmonic_field(Mat base, std::vector<Harmonic> hs) {
  return [base = std::move(base), hs = std::move(hs)](const Point& y) {
    Mat v = base;
    for (const auto& h : hs) {
      const cplx e = std::polar(1.0, phase(y, h.k));
      v += e * h.c + std::conj(e) * h.c.adjoint();
    }
    return v;
  };
}

}  // namespace

std::vector<Mat> gradient_symbol(int d, Index n) {
  std::vector<Mat> b;
  for (int j = 0; j < d; ++j) {
    Mat bj = Mat::Zero(d * n, n);
    bj.block(j * n, 0, n, n) = Mat::Identity(n, n);
    b.push_back(bj);
  }
  return b;
}

PeriodicProblem preset_harmonic_1d(double mean, double amp) {
  if (!(mean > std::abs(amp))) throw Error(ErrorCode::InvalidInput, "harmonic preset needs mean > |amp|");
  PeriodicProblem p;
  p.name = "harmonic_1d";
  p.lattice = cubic_lattice(1);
  p.b = gradient_symbol(1, 1);
  p.g = CoefField::closed_form(1, [mean, amp](const Point& y) { return scalar(mean + amp * std::cos(2 * M_PI * y[0])); });
  return p;
}

PeriodicProblem preset_constant(int d, const Mat& g, double lambda, Index n) {
  PeriodicProblem p;
  p.name = "constant";
  p.lattice = cubic_lattice(d);
  p.n = n;
  p.m = d * n;
  p.b = gradient_symbol(d, n);
  p.g = CoefField::constant(g);
  p.lambda = lambda;
  return p;
}

PeriodicProblem preset_oscillatory_1d(bool lower_order, bool weight, double lambda) {
  PeriodicProblem p;
  p.name = "oscillatory_1d";
  p.lattice = cubic_lattice(1);
  p.b = gradient_symbol(1, 1);
  p.g = CoefField::closed_form(1, [](const Point& y) {
    return scalar(2.0 + std::cos(2 * M_PI * y[0]) + 0.3 * std::sin(4 * M_PI * y[0]));
  });
  if (lower_order) {
    p.a.push_back(CoefField::closed_form(1, [](const Point& y) {
      return scalar(cplx(0.4 * std::cos(2 * M_PI * y[0]), 0.3 * std::sin(2 * M_PI * y[0])));
    }));
    p.Q = CoefField::closed_form(1, [](const Point& y) { return scalar(0.5 * std::cos(2 * M_PI * y[0])); });
  }
  if (weight)
    p.f = CoefField::closed_form(1, [](const Point& y) { return scalar(1.0 + 0.3 * std::sin(2 * M_PI * y[0])); });
  p.lambda = lambda;
  return p;
}

PeriodicProblem preset_random_smooth(const RandomPresetOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  PeriodicProblem p;
  p.name = "random_smooth";
  p.lattice = cubic_lattice(opt.d);
  p.n = opt.n;
  p.m = opt.d * opt.n;
  p.b = gradient_symbol(opt.d, opt.n);
  const double gmean = 2.0;
  p.g = CoefField::closed_form(
      p.m, harmonic_field(gmean * Mat::Identity(p.m, p.m),
                          random_harmonics(rng, opt.d, p.m, opt.harmonics, opt.amplitude * gmean, false)));
  if (opt.lower_order) {
    std::normal_distribution<double> nd;
    for (int j = 0; j < opt.d; ++j) {
      Mat base(p.n, p.n);
      for (Index r = 0; r < p.n; ++r)
        for (Index c = 0; c < p.n; ++c) base(r, c) = 0.2 * cplx(nd(rng), nd(rng));
      // a_j need not be Hermitian: the harmonic parts are split into C e + D e^* with independent D.
      auto h1 = random_harmonics(rng, opt.d, p.n, opt.harmonics, 0.5, false);
      auto h2 = random_harmonics(rng, opt.d, p.n, opt.harmonics, 0.5, false);
      p.a.push_back(CoefField::closed_form(p.n, [base, h1, h2](const Point& y) {
        Mat v = base;
        for (const auto& h : h1) v += std::polar(1.0, phase(y, h.k)) * h.c;
        for (const auto& h : h2) v += std::polar(1.0, -phase(y, h.k)) * h.c;
        return v;
      }));
    }
    p.Q = CoefField::closed_form(
        p.n, harmonic_field(0.3 * Mat::Identity(p.n, p.n), random_harmonics(rng, opt.d, p.n, opt.harmonics, 0.8, false)));
  }
  if (opt.weight)
    p.f = CoefField::closed_form(
        p.n, harmonic_field(Mat::Identity(p.n, p.n), random_harmonics(rng, opt.d, p.n, opt.harmonics, 0.3, true)));
  p.lambda = opt.lambda;
  return p;
}

PeriodicProblem preset_divergence_free(cplx a1, cplx a2, double lambda) {
  PeriodicProblem p;
  p.name = "divergence_free";
  p.lattice = cubic_lattice(2);
  p.b = gradient_symbol(2, 1);
  p.m = 2;
  p.g = CoefField::closed_form(2, [](const Point& y) {
    Mat v = Mat::Zero(2, 2);
    v(0, 0) = 2.0 + std::cos(2 * M_PI * y[1]);
    v(1, 1) = 2.0 + std::sin(2 * M_PI * y[0]);
    return v;
  });
  if (a1 != 0.0 || a2 != 0.0) {
    p.a.push_back(CoefField::constant(scalar(a1)));
    p.a.push_back(CoefField::constant(scalar(a2)));
  }
  p.lambda = lambda;
  return p;
}

}  // namespace homog
