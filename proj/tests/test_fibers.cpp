#include "homog/errors.hpp"
#include "homog/fiber_analysis.hpp"
#include "homog/gridfile.hpp"
#include "homog/presets.hpp"
#include "homog/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

using namespace homog;

namespace {

RVec vec(std::initializer_list<double> v) {
  RVec r(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

double min_eig(const Mat& a) { return herm_eig(hermitian_part(a)).values(0); }

// Boundary distance of the Voronoi cell of 0 along a unit direction, by bisection
// against every lattice point in a generous box.
double voronoi_radius(const RMat& dual, const RVec& dir) {
  std::vector<RVec> pts;
  for (int i = -3; i <= 3; ++i)
    for (int j = -3; j <= 3; ++j)
      if (i || j) pts.push_back(dual * vec({double(i), double(j)}));
  auto inside = [&](double r) {
    const RVec x = r * dir;
    for (const RVec& v : pts)
      if ((x - v).squaredNorm() < x.squaredNorm()) return false;
    return true;
  };
  double lo = 0.0, hi = 100.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? lo : hi) = mid;
  }
  return lo;
}

FiberModel model(const PeriodicProblem& p, int N) { return build_fiber_model(p, N); }

}  // namespace

// ---------------------------------------------------------------- lattice

TEST(Lattice, CubicRadii) {
  for (int d = 1; d <= 3; ++d) {
    const Lattice l = cubic_lattice(d);
    EXPECT_NEAR(l.r0, M_PI, 1e-14);
    EXPECT_NEAR(l.r1, M_PI * std::sqrt(double(d)), 1e-13);
    EXPECT_NEAR(l.cell_volume, 1.0, 1e-15);
    EXPECT_LT((l.dual.transpose() * l.basis - 2 * M_PI * RMat::Identity(d, d)).norm(), 1e-13);
  }
}

TEST(Lattice, HexagonalRadiiAgreeWithBruteForceVoronoi) {
  RMat a(2, 2);
  a << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0;
  const Lattice l = build_lattice(a);
  // frozen: inradius 2 pi / sqrt 3 and vertex radius 4 pi / 3 of the hexagonal zone
  EXPECT_NEAR(l.r0, 3.6275987284684357, 1e-12);
  EXPECT_NEAR(l.r1, 4.1887902047863905, 1e-12);
  double lo = 1e300, hi = 0.0;
  for (int k = 0; k < 720; ++k) {
    const double ang = M_PI * k / 360.0;
    const double r = voronoi_radius(l.dual, vec({std::cos(ang), std::sin(ang)}));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  EXPECT_NEAR(l.r0, lo, 1e-9);
  EXPECT_NEAR(l.r1, hi, 1e-4);
}

TEST(Lattice, SingularBasisRejected) {
  RMat a(2, 2);
  a << 1.0, 2.0, 1.0, 2.0;
  try {
    build_lattice(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularBasis);
  }
}

TEST(Lattice, BrillouinReductionIsShortest) {
  RMat a(2, 2);
  a << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0;
  const Lattice l = build_lattice(a);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 200; ++t) {
    const RVec p = vec({u(rng), u(rng)});
    const RVec q = l.to_brillouin(p);
    const RVec shift = p - q;
    EXPECT_NEAR(shift(0), std::round(shift(0)), 1e-12);
    EXPECT_NEAR(shift(1), std::round(shift(1)), 1e-12);
    EXPECT_LE(l.wavevector(q).norm(), l.r1 + 1e-9);
  }
}

// ---------------------------------------------------------------- fourier and grid files

TEST(Fourier, CosineCoefficientsAndRoundTrip) {
  const ModeSet ms = make_modes(2, 3);
  const Grid g = grid_for(ms);
  Vec s(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    const auto y = g.point(i);
    s(i) = 2.0 + std::cos(2 * M_PI * (y[0] - 2 * y[1]));
  }
  const Vec c = dft(g, s);
  EXPECT_NEAR(std::abs(c(g.freq_index({0, 0, 0})) - 2.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(c(g.freq_index({1, -2, 0})) - 0.5), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(c(g.freq_index({-1, 2, 0})) - 0.5), 0.0, 1e-14);
  EXPECT_LT((idft(g, c) - s).norm(), 1e-12);
}

TEST(Fourier, SynthesizeTruncateRoundTrip) {
  const ModeSet ms = make_modes(2, 4);
  const Grid g = grid_for(ms);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  Mat c(ms.count() * 2, 3);
  for (Index i = 0; i < c.rows(); ++i)
    for (Index j = 0; j < c.cols(); ++j) c(i, j) = cplx(nd(rng), nd(rng));
  const MatField f = synthesize(ms, g, c, 2);
  EXPECT_LT((truncate(ms, dft(g, f)) - c).norm(), 1e-12 * c.norm());
}

TEST(GridFile, RoundTripAndResample) {
  const ModeSet ms = make_modes(2, 2);
  const Grid g = grid_for(ms);
  const PeriodicProblem p = preset_random_smooth({});
  const MatField f = p.g.sample(g);
  const auto path = std::filesystem::temp_directory_path() / "homog_gridfile_test.phom";
  write_grid_file(path.string(), g, f);
  const auto [g2, f2] = read_grid_file(path.string());
  EXPECT_EQ(g2.M, g.M);
  for (std::size_t k = 0; k < f.e.size(); ++k) EXPECT_EQ((f.e[k] - f2.e[k]).norm(), 0.0);
  // the random preset uses harmonics up to 2, so spectral resampling is exact
  const CoefField cf = CoefField::from_samples(g2, f2);
  const Grid fine{2, 20};
  const MatField exact = p.g.sample(fine), res = cf.sample(fine);
  for (std::size_t k = 0; k < exact.e.size(); ++k) EXPECT_LT((exact.e[k] - res.e[k]).norm(), 1e-12);
  std::filesystem::remove(path);
}

TEST(GridFile, RejectsBadHeader) {
  const auto path = std::filesystem::temp_directory_path() / "homog_gridfile_bad.phom";
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOPE1234";
  }
  try {
    read_grid_file(path.string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DataError);
  }
  std::filesystem::remove(path);
}

// ---------------------------------------------------------------- fiber assembly

TEST(Fiber, ScalarLaplacianIsDiagonal) {
  PeriodicProblem p = preset_constant(1, Mat::Identity(1, 1), 1.0);
  const FiberContext ctx = make_fiber_context(p, 5);
  const double k = 0.7, eps = 0.3;
  const Mat b = assemble_fiber(ctx, vec({k}), eps);
  for (Index i = 0; i < ctx.modes.count(); ++i) {
    const double xi = 2 * M_PI * ctx.modes.modes[static_cast<std::size_t>(i)][0];
    EXPECT_NEAR(b(i, i).real(), (xi + k) * (xi + k) + eps * eps, 1e-11);
  }
  EXPECT_LT((b - Mat(b.diagonal().asDiagonal())).norm(), 1e-12);
}

TEST(Fiber, ConstantMatrixCoefficientIsBlockDiagonal) {
  Mat g0(2, 2);
  g0 << 2.0, cplx(0.3, 0.2), cplx(0.3, -0.2), 1.5;
  const PeriodicProblem p = preset_constant(2, g0, 0.8);
  const FiberContext ctx = make_fiber_context(p, 3);
  const RVec k = vec({0.4, -0.9});
  const double eps = 0.5;
  const Mat b = assemble_fiber(ctx, k, eps);
  for (Index i = 0; i < ctx.modes.count(); ++i)
    for (Index j = 0; j < ctx.modes.count(); ++j) {
      const cplx expect = i == j ? (p.symbol(ctx.xi[static_cast<std::size_t>(i)] + k).adjoint() * g0 *
                                    p.symbol(ctx.xi[static_cast<std::size_t>(i)] + k))(0, 0) + eps * eps * 0.8
                                 : cplx(0.0);
      EXPECT_NEAR(std::abs(b(i, j) - expect), 0.0, 1e-11);
    }
}

TEST(Fiber, OscillatoryEntriesMatchQuadratureOfForm) {
  const PeriodicProblem p = preset_oscillatory_1d(true, false, 2.0);
  const FiberContext ctx = make_fiber_context(p, 4);
  const double k = 0.9, eps = 0.4;
  const Mat b = assemble_fiber(ctx, vec({k}), eps);
  using boost::math::quadrature::gauss_kronrod;
  for (Index i = 0; i < ctx.modes.count(); ++i)
    for (Index j = 0; j < ctx.modes.count(); ++j) {
      const double xp = 2 * M_PI * ctx.modes.modes[static_cast<std::size_t>(i)][0];
      const double xq = 2 * M_PI * ctx.modes.modes[static_cast<std::size_t>(j)][0];
      // form b[e_q, e_p] with e_q = e^{i xq y}: integrand real and imaginary parts
      auto integrand = [&](double y, bool imag) {
        const Point pt{y, 0, 0};
        const cplx g = p.g.fn(pt)(0, 0), a = p.a[0].fn(pt)(0, 0), q = p.Q->fn(pt)(0, 0);
        const cplx ph = std::polar(1.0, (xq - xp) * y);
        const cplx v = ph * ((xp + k) * g * (xq + k) + eps * (a * (xq + k) + (xp + k) * std::conj(a)) +
                             eps * eps * (q + p.lambda));
        return imag ? v.imag() : v.real();
      };
      const double re = gauss_kronrod<double, 61>::integrate([&](double y) { return integrand(y, false); }, 0.0, 1.0, 10, 1e-14);
      const double im = gauss_kronrod<double, 61>::integrate([&](double y) { return integrand(y, true); }, 0.0, 1.0, 10, 1e-14);
      EXPECT_NEAR(std::abs(b(i, j) - cplx(re, im)), 0.0, 1e-10) << i << "," << j;
    }
}

TEST(Fiber, HermitianPositiveAndKernelDimension) {
  for (Index n : {Index(1), Index(2)}) {
    RandomPresetOptions o;
    o.n = n;
    o.lower_order = true;
    o.weight = true;
    o.seed = 10 + static_cast<std::uint64_t>(n);
    PeriodicProblem p = preset_random_smooth(o);
    p.lambda = admissible_lambda(p);
    const FiberContext ctx = make_fiber_context(p, 3);
    for (const RVec& k : brillouin_grid(p.lattice, 3))
      for (double eps : {0.05, 0.5}) {
        const Mat b = assemble_fiber(ctx, k, eps);
        EXPECT_LT(hermitian_defect(b), 1e-12);
        EXPECT_GT(min_eig(b), 0.0);
      }
    const KernelInfo ker = kernel_projection_gram(principal_matrix(ctx, RVec::Zero(2)));
    EXPECT_EQ(ker.n, n);
    const double c = measured_lower_constant(ctx, 3, {0.1, 0.5});
    EXPECT_GT(c, 0.0);
    EXPECT_GE(c, fiber_constants(ctx).ccheck * (1 - 1e-9));
  }
}

TEST(Fiber, NegativeLambdaBeyondAdmissibleFails) {
  PeriodicProblem p = preset_constant(1, Mat::Identity(1, 1), -5.0);
  const FiberContext ctx = make_fiber_context(p, 3);
  try {
    assemble_fiber(ctx, vec({0.0}), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PositivityViolation);
  }
}

TEST(Fiber, DirectionalConsistencyWithOperators) {
  RandomPresetOptions o;
  o.lower_order = true;
  o.seed = 5;
  PeriodicProblem p = preset_random_smooth(o);
  p.lambda = admissible_lambda(p);
  const FiberContext ctx = make_fiber_context(p, 2);
  const RVec theta = vec({0.6, 0.8});
  const AbstractFamily ops = hatted_operators(ctx, theta);
  const GramFamily fromops = GramFamily::from(ops);
  const GramFamily direct = hatted_gram(ctx, theta);
  for (double t : {-0.3, 0.2, 1.1})
    for (double eps : {0.0, 0.25, 1.0}) {
      const Mat expect = assemble_hatted(ctx, t * theta, eps);
      EXPECT_LT((fromops.B(t, eps) - expect).norm(), 1e-10 * expect.norm());
      EXPECT_LT((direct.B(t, eps) - expect).norm(), 1e-10 * expect.norm());
    }
}

// ---------------------------------------------------------------- cell problems

TEST(Cell, ConstantCoefficientHasNoCorrector) {
  Mat g0(2, 2);
  g0 << 2.0, 0.5, 0.5, 1.0;
  const FiberModel fm = model(preset_constant(2, g0, 1.0), 3);
  EXPECT_LT(fm.cell.Lambda.norm(), 1e-14);
  EXPECT_LT((fm.cell.g0 - g0).norm(), 1e-14);
  EXPECT_TRUE(fm.ng.vanishes());
}

TEST(Cell, HarmonicMeanOracle) {
  using boost::math::quadrature::gauss_kronrod;
  const double inv = gauss_kronrod<double, 61>::integrate([](double x) { return 1.0 / (2.0 + std::cos(2 * M_PI * x)); },
                                                          0.0, 1.0, 15, 1e-15);
  const double oracle = 1.0 / inv;
  EXPECT_NEAR(oracle, 1.7320508075688772, 1e-13);
  const FiberModel fm = model(preset_harmonic_1d(), 32);
  EXPECT_NEAR(fm.cell.g0(0, 0).real(), oracle, 1e-10);
  EXPECT_NEAR(fm.cell.g0(0, 0).imag(), 0.0, 1e-14);
  EXPECT_NEAR(fm.cell.g_harmonic(0, 0).real(), oracle, 1e-10);
}

TEST(Cell, ConstantLowerOrderGivesNoTildeCorrector) {
  const FiberModel fm = model(preset_divergence_free(cplx(0.3, 0.1), cplx(-0.2, 0.4), 2.0), 4);
  EXPECT_LT(fm.cell.LambdaT.norm(), 1e-14);
  EXPECT_LT(fm.cell.V.norm(), 1e-14);
  EXPECT_LT(fm.cell.W.norm(), 1e-14);
}

TEST(Cell, EffectiveMatrixBetweenHarmonicAndArithmeticMeans) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    RandomPresetOptions o;
    o.seed = seed;
    o.n = seed % 2 + 1;
    o.amplitude = 0.8;
    const FiberModel fm = model(preset_random_smooth(o), 5);
    EXPECT_GE(min_eig(fm.cell.g0 - fm.cell.g_harmonic), -1e-10);
    EXPECT_GE(min_eig(fm.cell.g_mean - fm.cell.g0), -1e-10);
    EXPECT_LT(hermitian_defect(fm.cell.g0), 1e-10);
  }
}

TEST(Cell, DivergenceFreeColumnsGiveArithmeticMean) {
  const FiberModel fm = model(preset_divergence_free(), 6);
  EXPECT_LT((fm.cell.g0 - fm.cell.g_mean).norm(), 1e-8);
  EXPECT_LT(fm.cell.Lambda.norm(), 1e-12);
}

TEST(Cell, TruncationConvergence) {
  RandomPresetOptions o;
  o.seed = 3;
  const PeriodicProblem p = preset_random_smooth(o);
  const FiberModel a = model(p, 16);
  const FiberModel b = model(p, 32);  // above the dense limit: conjugate gradients
  EXPECT_FALSE(a.cell.iterative);
  EXPECT_TRUE(b.cell.iterative);
  EXPECT_LT((a.cell.g0 - b.cell.g0).norm(), 1e-6);
}

TEST(Cell, IterativeSolverMatchesDense) {
  RandomPresetOptions o;
  o.seed = 8;
  o.lower_order = true;
  o.weight = true;
  const PeriodicProblem p = preset_random_smooth(o);
  const FiberContext ctx = make_fiber_context(p, 4);
  const CellSolution dense = solve_cell_problems(ctx);
  CellOptions it;
  it.dense_limit = 10;
  const CellSolution cg = solve_cell_problems(ctx, it);
  EXPECT_TRUE(cg.iterative);
  EXPECT_LT((dense.Lambda - cg.Lambda).norm(), 1e-10);
  EXPECT_LT((dense.LambdaT - cg.LambdaT).norm(), 1e-10);
}

TEST(Cell, JsonExportHasEffectiveData) {
  const FiberModel fm = model(preset_harmonic_1d(), 8);
  const std::string js = cell_json(fm.cell);
  for (const char* key : {"\"g0\"", "\"V\"", "\"W\"", "\"Qbar\"", "\"f0\"", "\"Lambda_G0\"", "\"LambdaT_G0\""})
    EXPECT_NE(js.find(key), std::string::npos) << key;
}

// ---------------------------------------------------------------- N_G coefficients

TEST(NG, OnlyPrincipalCoefficientWithoutLowerOrder) {
  RandomPresetOptions o;
  o.seed = 4;
  const FiberModel fm = model(preset_random_smooth(o), 5);
  EXPECT_GT(fm.ng.MG[0].norm() + fm.ng.MG[1].norm(), 1e-6);
  EXPECT_LT(fm.ng.TG0.norm() + fm.ng.TG.norm() + fm.ng.TtG.norm(), 1e-14);
  for (int j = 0; j < 2; ++j) {
    EXPECT_LT(fm.ng.MG2[static_cast<std::size_t>(j)].norm(), 1e-14);
    EXPECT_LT(fm.ng.AT[static_cast<std::size_t>(j)].norm(), 1e-14);
  }
}

TEST(NG, ThirdOrderBound) {
  RandomPresetOptions o;
  o.seed = 6;
  o.lower_order = true;
  o.weight = true;
  PeriodicProblem p = preset_random_smooth(o);
  p.lambda = admissible_lambda(p);
  const FiberModel fm = model(p, 4);
  double lo = 1e300, hi = 0.0;
  for (double r : {0.01, 0.1, 0.5})
    for (double ang : {0.0, 1.0, 2.0})
      for (double eps : {0.0, 0.01, 0.1, 0.5}) {
        const RVec k = r * vec({std::cos(ang), std::sin(ang)});
        const double rho = std::pow(k.squaredNorm() + eps * eps, 1.5);
        const double v = fm.ng.at(k, eps).norm() / rho;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  EXPECT_LT(hi, 1e3);
  EXPECT_GT(hi, 0.0);
}

// ---------------------------------------------------------------- corrector and remainder

TEST(FiberCorrector, VanishesForConstantCoefficients) {
  const FiberModel fm = model(preset_constant(1, 1.5 * Mat::Identity(1, 1), 1.0), 4);
  EXPECT_LT(fiber_corrector(fm, vec({0.3}), 0.2, 0.7).norm(), 1e-14);
  const FiberRemainder r = fiber_remainder(fm, vec({0.3}), 0.2, 0.7, 0.5);
  EXPECT_LT(r.remainder, 1e-13);
}

TEST(FiberCorrector, InitialValue) {
  PeriodicProblem p = preset_oscillatory_1d(true, true);
  p.lambda = admissible_lambda(p);
  const FiberModel fm = model(p, 6);
  const RVec k = vec({0.4});
  const double eps = 0.3;
  const Mat pz = fm.ctx.constants_embedding();
  const Mat col = (fm.cell.LambdaG(fm.ctx) * p.symbol(k) + eps * fm.cell.LambdaTG(fm.ctx)) * fm.cell.f0 * fm.cell.f0;
  const Mat expect = col * pz.adjoint() + pz * col.adjoint();
  EXPECT_LT((fiber_corrector(fm, k, eps, 0.0) - expect).norm(), 1e-13);
}

TEST(FiberCorrector, IntegralTermMatchesQuadrature) {
  PeriodicProblem p = preset_oscillatory_1d(true, true);
  p.lambda = admissible_lambda(p);
  const FiberModel fm = model(p, 6);
  const RVec k = vec({0.5});
  const double eps = 0.2, s = 1.3;
  const Mat b0 = effective_operator(fm.ctx, fm.cell, k, eps);
  const Mat& f0 = fm.cell.f0;
  const Mat nn = fm.ng.at(k, eps);
  using boost::math::quadrature::gauss_kronrod;
  const double oracle = gauss_kronrod<double, 61>::integrate(
      [&](double u) { const Mat e1 = (-b0 * (s - u)).exp(), e2 = (-b0 * u).exp();
        return (f0 * e1 * f0 * nn * f0 * e2 * f0)(0, 0).real();
      }, 0.0, s, 10,
      1e-15);
  EXPECT_NEAR(corrector_integral(fm, k, eps, s)(0, 0).real(), oracle, 1e-9 * std::max(1.0, std::abs(oracle)));
}

TEST(FiberRemainder, EpsSweepAtZeroQuasimomentumBounded) {
  PeriodicProblem p = preset_oscillatory_1d(true, true);
  p.lambda = admissible_lambda(p);
  const FiberModel fm = model(p, 8);
  const double c = measured_lower_constant(fm.ctx, 8, {0.05, 0.2, 0.5});
  double lo = 1e300, hi = 0.0;
  for (double eps : {0.4, 0.2, 0.1, 0.05, 0.025}) {
    const FiberRemainder r = fiber_remainder(fm, vec({0.0}), eps, 1.0, c);
    lo = std::min(lo, r.ratio_nonneg);
    hi = std::max(hi, r.ratio_nonneg);
  }
  EXPECT_LT(hi, 1e2);
}

TEST(FiberRemainder, TimeSweepRatioBounded) {
  const PeriodicProblem p = preset_oscillatory_1d(false, false);
  const FiberModel fm = model(p, 8);
  const double c = measured_lower_constant(fm.ctx, 8, {0.05, 0.2});
  const RVec k = vec({0.3});
  const double eps = 0.1;
  double hi = 0.0;
  for (double s : {0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0}) hi = std::max(hi, fiber_remainder(fm, k, eps, s, c).ratio_pos);
  EXPECT_LT(hi, 1.0);
}

// ---------------------------------------------------------------- cross validation

TEST(CrossValidation, ConstantCoefficients) {
  Mat g0(2, 2);
  g0 << 2.0, 0.5, 0.5, 1.0;
  const FiberModel fm = model(preset_constant(2, g0, 1.0), 3);
  const CrossValidation cv = cross_validate_abstract(fm, vec({1.0, 0.0}), 0.3, 0.2, 1e-10);
  EXPECT_TRUE(cv.passed());
}

TEST(CrossValidation, HarmonicGerm) {
  const FiberModel fm = model(preset_harmonic_1d(), 16);
  const BorderedFamily bf = bordered_gram(fm.ctx, vec({1.0}));
  const ThresholdData td = threshold(bf.base, threshold_options(fiber_constants(fm.ctx, true)));
  EXPECT_NEAR(td.S(0, 0).real(), std::sqrt(3.0), 1e-8);
  EXPECT_TRUE(cross_validate_abstract(fm, vec({1.0}), 0.4, 0.0).passed());
}

TEST(CrossValidation, RandomInstances) {
  struct Case {
    Index n;
    bool lower, weight;
    std::uint64_t seed;
  };
  for (const Case c : {Case{1, false, false, 21}, Case{1, true, false, 22}, Case{1, true, true, 23},
                       Case{2, true, true, 24}}) {
    RandomPresetOptions o;
    o.n = c.n;
    o.lower_order = c.lower;
    o.weight = c.weight;
    o.seed = c.seed;
    PeriodicProblem p = preset_random_smooth(o);
    p.lambda = admissible_lambda(p);
    const FiberModel fm = model(p, 4);
    const CrossValidation cv = cross_validate_abstract(fm, vec({0.8, -0.6}), 0.3, 0.15, 1e-7, false);
    EXPECT_TRUE(cv.passed()) << "seed " << c.seed << " Z " << cv.err_Z << " Zt " << cv.err_Zt << " ZG " << cv.err_ZG
                             << " germ " << cv.err_germ << " L " << cv.err_L << " N " << cv.err_N;
  }
}
