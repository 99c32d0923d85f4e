#include "homog/errors.hpp"
#include "homog/scalar.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace homog;

namespace {

CoefField scalar_field(std::function<double(const Point&)> fn) {
  return CoefField::closed_form(1, [fn](const Point& y) { return Mat::Constant(1, 1, fn(y)); });
}

ScalarInput plain_input(int d) {
  ScalarInput in;
  in.lattice = cubic_lattice(d);
  in.g = CoefField::constant(Mat::Identity(d, d));
  for (int j = 0; j < d; ++j) in.A.push_back(CoefField::constant(Mat::Zero(1, 1)));
  in.v = CoefField::constant(Mat::Zero(1, 1));
  in.Vcal = CoefField::constant(Mat::Zero(1, 1));
  return in;
}

// Random instance: amplitudes drawn per seed, lambda from the generic admissibility rule.
ScalarInput random_input(std::uint64_t seed, int d) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarPresetOptions o;
  o.d = d;
  o.g_amp = 0.9 * u(rng);
  o.A_amp = 0.5 * u(rng);
  o.v_amp = 0.8 * u(rng);
  o.V_amp = 0.5 * u(rng);
  ScalarInput in = preset_scalar_schrodinger(o);
  in.lambda = admissible_lambda(build_scalar_problem(in), 4);
  return in;
}


}  // namespace

TEST(ScalarPotentials, PoissonClosedForm1D) {
  ScalarInput in = plain_input(1);
  in.v = scalar_field([](const Point& y) { return std::cos(2 * M_PI * y[0]); });
  const ScalarPotentials p = scalar_potentials(in);
  double err_phi = 0, err_zeta = 0;
  for (Index i = 0; i < p.grid.size(); ++i) {
    const double x = p.grid.point(i)[0];
    err_phi = std::max(err_phi, std::abs(p.Phi(i) - (-std::cos(2 * M_PI * x) / (4 * M_PI * M_PI))));
    err_zeta = std::max(err_zeta, std::abs(p.zeta[0](i) - (-std::sin(2 * M_PI * x) / (2 * M_PI))));
  }
  EXPECT_LT(err_phi, 1e-14);
  EXPECT_LT(err_zeta, 1e-14);
}

TEST(ScalarPotentials, DivergenceOfZetaRecoversV) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ScalarInput in = random_input(seed, 2);
    const ScalarPotentials p = scalar_potentials(in);
    const Vec v = in.v.sample(p.grid).at(0, 0);
    EXPECT_LT((p.divergence_check - v).cwiseAbs().maxCoeff(), 1e-12) << "seed " << seed;
  }
}

TEST(ScalarPotentials, NonzeroMeanRejected) {
  ScalarInput in = plain_input(1);
  in.v = scalar_field([](const Point& y) { return 0.1 + std::cos(2 * M_PI * y[0]); });
  try {
    scalar_potentials(in);
    FAIL() << "expected MeanNotZero";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MeanNotZero);
  }
}

TEST(ScalarProblem, PureMetricHasNoLowerOrderTerms) {
  const PeriodicProblem p = build_scalar_problem(plain_input(2));
  const Grid g = grid_for(make_modes(2, 3));
  for (const CoefField& a : p.a) EXPECT_LT(a.sample(g).at(0, 0).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT(p.Q->sample(g).at(0, 0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ScalarEffective, IdentityMetricIsTrivial) {
  ScalarInput in = plain_input(2);
  in.Vcal = CoefField::constant(Mat::Constant(1, 1, 0.7));
  const ScalarEffective e = scalar_effective(in, 3);
  EXPECT_LT(e.Psi_c.norm(), 1e-15);
  EXPECT_LT((e.g0 - RMat::Identity(2, 2)).norm(), 1e-15);
  EXPECT_LT(e.LT1_c.norm() + e.LT2_c.norm(), 1e-15);
  EXPECT_LT(e.V1.norm() + e.V2.norm() + e.A0.norm(), 1e-15);
  EXPECT_NEAR(e.W, 0.0, 1e-15);
  EXPECT_NEAR(e.V0, 0.7, 1e-14);
  const ScalarN n = scalar_N_coefficients(e);
  EXPECT_LT(n.N12.norm() + n.N21.norm() + std::abs(n.N22), 1e-15);
}

TEST(ScalarEffective, HarmonicMean1D) {
  ScalarInput in = plain_input(1);
  in.g = CoefField::closed_form(1, [](const Point& y) { return Mat::Constant(1, 1, 2.0 + std::cos(2 * M_PI * y[0])); });
  const ScalarEffective e = scalar_effective(in, 24);
  EXPECT_NEAR(e.g0(0, 0), std::sqrt(3.0), 1e-10);
}

TEST(ScalarEffective, NoSingularOrMagneticTermGivesNoN) {
  ScalarPresetOptions o;
  o.A_amp = 0.0;
  o.v_amp = 0.0;
  const ScalarEffective e = scalar_effective(preset_scalar_schrodinger(o), 4);
  const ScalarN n = scalar_N_coefficients(e);
  EXPECT_LT(n.N12.norm() + n.N21.norm() + std::abs(n.N22), 1e-14);
}

// Property: realness, W >= 0, mean bounds, N12 symmetry over random instances.
TEST(ScalarEffective, StructuralPropertiesOnRandomInstances) {
  for (std::uint64_t seed = 10; seed < 16; ++seed) {
    const ScalarInput in = random_input(seed, 2);
    const ScalarEffective e = scalar_effective(in, 5);
    EXPECT_LT(e.imag_residual, 1e-12) << "seed " << seed;
    EXPECT_GE(e.W, -1e-14);
    EXPECT_LT((e.g0 - e.g0.transpose()).norm(), 1e-12);
    // g0 <= arithmetic mean
    RMat gm(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) gm(i, j) = e.g.at(i, j).mean().real();
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<RMat>(gm - e.g0).eigenvalues().minCoeff(), -1e-10);
    const ScalarN n = scalar_N_coefficients(e);
    EXPECT_LT((n.N12 - n.N12.transpose()).norm(), 1e-15);
    EXPECT_LT((n.N12 - 0.5 * (n.N12_raw + n.N12_raw.transpose())).norm(), 1e-15);
  }
}

// Cross-module oracle: the generic matrix pipeline on the built problem.
class GenericPipeline : public ::testing::TestWithParam<std::pair<int, std::uint64_t>> {};

TEST_P(GenericPipeline, MatchesGenericPipeline) {
  const auto [d, seed] = GetParam();
  const int N = d == 1 ? 8 : 4;
  const ScalarInput in = random_input(seed, d);
  const ScalarEffective e = scalar_effective(in, N);
  const ScalarN sn = scalar_N_coefficients(e);
  const FiberModel fm = build_fiber_model(build_scalar_problem(in), N);
  const CellSolution& c = fm.cell;

  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) EXPECT_NEAR(std::abs(c.g0(i, j) - e.g0(i, j)), 0.0, 1e-10);
  for (int j = 0; j < d; ++j) {
    EXPECT_NEAR(std::abs(c.V(j, 0) - cplx(e.V1(j), e.V2(j))), 0.0, 1e-10);
    EXPECT_LT((c.Lambda_f.at(0, j) - cplx(0.0, 1.0) * e.Psi[static_cast<std::size_t>(j)]).cwiseAbs().maxCoeff(), 1e-10);
  }
  EXPECT_LT((c.LambdaT_f.at(0, 0) - e.LT1 - cplx(0.0, 1.0) * e.LT2).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(c.W(0, 0).real(), e.W, 1e-10);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 5; ++t) {
    RVec k(d);
    for (int i = 0; i < d; ++i) k(i) = 2.0 * u(rng);
    const double eps = 0.2 + 0.5 * std::abs(u(rng));
    EXPECT_NEAR(std::abs(effective_symbol(fm.ctx, c, k, eps)(0, 0) - e.symbol(k, eps)), 0.0, 1e-9);
    EXPECT_LT(fm.ng.N11(k).norm(), 1e-10);
    EXPECT_NEAR(std::abs(fm.ng.at(k, eps)(0, 0) - sn.symbol(k, eps)), 0.0, 1e-9) << "k " << k.transpose();
  }
}

INSTANTIATE_TEST_SUITE_P(Instances, GenericPipeline,
                         ::testing::Values(std::pair<int, std::uint64_t>{1, 21}, std::pair<int, std::uint64_t>{1, 22},
                                           std::pair<int, std::uint64_t>{2, 23}, std::pair<int, std::uint64_t>{2, 24}));

TEST(ScalarCorrector, CommutedFormMatchesGenericCorrector) {
  const ScalarInput in = random_input(31, 1);
  const int N = 6;
  const ScalarEffective e = scalar_effective(in, N);
  const ScalarN sn = scalar_N_coefficients(e);
  const FiberModel fm = build_fiber_model(build_scalar_problem(in), N);
  const double eps = 0.25, s = 0.2;
  const BoxSetup box = make_box(fm, eps, 4);
  for (Index f = 0; f < box.fibers(); ++f) {
    const FiberPropagator prop(box, f);
    for (CorrectorVariant v : {CorrectorVariant::with_smoothing, CorrectorVariant::without_smoothing}) {
      const Mat generic = prop.corrector_matrix(s, v);
      EXPECT_LT((generic - scalar_corrector_matrix(e, sn, box, f, s, v)).norm(), 1e-9 * (1.0 + generic.norm()));
    }
  }
}

TEST(ScalarCorrector, UnsmoothedNeedsParabolicTime) {
  const ScalarInput in = random_input(32, 1);
  const ScalarEffective e = scalar_effective(in, 3);
  const FiberModel fm = build_fiber_model(build_scalar_problem(in), 3);
  const BoxSetup box = make_box(fm, 0.5, 2);
  EXPECT_THROW(scalar_corrector_matrix(e, scalar_N_coefficients(e), box, 0, 0.1, CorrectorVariant::without_smoothing),
               Error);
}
