#include "homog_harness/commands.hpp"

#include "homog/abstract.hpp"
#include "homog/errors.hpp"
#include "homog/evolution.hpp"
#include "homog/gridfile.hpp"
#include "homog/parallel.hpp"
#include "homog/presets.hpp"
#include "homog/rate.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>

namespace homog::harness {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

json to_json(const Mat& m) {
  json re = json::array(), im = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json r = json::array(), c = json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      r.push_back(m(i, j).real());
      c.push_back(m(i, j).imag());
    }
    re.push_back(r);
    im.push_back(c);
  }
  return {{"re", re}, {"im", im}};
}

json to_json(const RMat& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    out.push_back(r);
  }
  return out;
}

json to_json(const RVec& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json fit_json(const RateFit& f) {
  if (f.exact_agreement) return {{"exact_agreement", true}};
  return {{"slope", f.slope}, {"constant", f.constant}, {"residual_max", f.residual_max}, {"exact_agreement", false}};
}

std::string key_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

double min_eig(const Mat& a) { return herm_eig(hermitian_part(a)).values(0); }

int modes(const Config& c, int fallback) {
  const auto n = c.integer("discretization.modes", fallback);
  if (n < 4 || n > 64) config_error("discretization.modes must lie in [4, 64]");
  return static_cast<int>(n);
}

int grid_factor(const Config& c) {
  const auto f = c.integer("discretization.grid_factor", 4);
  if (f < 2 || f > 16) config_error("discretization.grid_factor must lie in [2, 16]");
  return static_cast<int>(f);
}

std::vector<double> eps_list(const Config& c, const std::vector<double>& fallback, std::size_t min_count) {
  const std::vector<double> e = c.reals("sweep.eps", fallback);
  for (double x : e)
    if (!(x > 0.0 && x <= 1.0)) config_error("sweep.eps values must lie in (0, 1]");
  for (std::size_t i = 1; i < e.size(); ++i)
    if (!(e[i] < e[i - 1])) config_error("sweep.eps must be strictly decreasing");
  if (e.size() < min_count) config_error("sweep.eps needs at least " + std::to_string(min_count) + " values");
  return e;
}

std::vector<double> s_list(const Config& c, const std::vector<double>& fallback) {
  const std::vector<double> s = c.reals("sweep.s", fallback);
  for (double x : s)
    if (!(x > 0.0)) config_error("sweep.s values must be positive");
  return s;
}

SweepMode parse_mode(const std::string& m) {
  if (m == "principal") return SweepMode::principal;
  if (m == "corrected") return SweepMode::corrected;
  config_error("sweep.mode must be principal, corrected or both");
}

CorrectorVariant parse_variant(const Config& c) {
  const std::string v = c.str("sweep.variant", "smoothed");
  if (v == "smoothed") return CorrectorVariant::with_smoothing;
  if (v == "unsmoothed") return CorrectorVariant::without_smoothing;
  config_error("sweep.variant must be smoothed or unsmoothed");
}

// Least-squares slope of log y against log x; NaN below two usable points.
double running_slope(const std::vector<std::pair<double, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& [x, y] : pts) {
    if (!(x > 0 && y > 0)) continue;
    const double lx = std::log(x), ly = std::log(y);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::nan("");
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? std::nan("") : (n * sxy - sx * sy) / den;
}

FiberModel build_model(const ProblemSetup& ps, const Config& c, int N) {
  return build_fiber_model(ps.problem, N, {}, grid_factor(c));
}

void summarize_problem(Report& r, const ProblemSetup& ps, int N) {
  r.summary["problem"] = {{"name", ps.problem.name}, {"d", ps.problem.d()},    {"n", ps.problem.n},
                          {"m", ps.problem.m},       {"lambda", ps.problem.lambda}, {"modes", N}};
}

// ---------------------------------------------------------------- cell-solve

void cell_solve(const Config& c, const ProblemSetup& ps, Report& r) {
  const int N = modes(c, 16);
  summarize_problem(r, ps, N);
  const FiberModel fm = build_model(ps, c, N);
  const CellSolution& cell = fm.cell;
  r.summary["cell"] = json::parse(cell_json(cell));
  r.summary["cell"]["g_harmonic"] = to_json(cell.g_harmonic);
  r.summary["cell"]["g_mean"] = to_json(cell.g_mean);
  r.summary["cell"]["residual"] = cell.residual;
  r.summary["cell"]["iterative"] = cell.iterative;
  if (cell.g0.rows() == 1) r.summary["g0"] = cell.g0(0, 0).real();

  r.at_most("cell_residual", cell.residual, c.real("check.residual_tol", 1e-10));
  const double slack = c.real("check.bracket_tol", 1e-10);
  r.at_least("g0_minus_harmonic_min_eig", min_eig(cell.g0 - cell.g_harmonic), -slack);
  r.at_least("mean_minus_g0_min_eig", min_eig(cell.g_mean - cell.g0), -slack);
  if (c.has("check.expect_g0")) {
    if (cell.g0.rows() != 1) config_error("check.expect_g0 needs a problem with m = 1");
    r.at_most("g0_vs_expected", std::abs(cell.g0(0, 0) - c.real("check.expect_g0", 0.0)),
              c.real("check.g0_tol", 1e-8));
  }
}

// --------------------------------------------------------------- fiber-check

void fiber_check(const Config& c, const ProblemSetup& ps, Report& r, int threads) {
  const int N = modes(c, 4);
  summarize_problem(r, ps, N);
  const FiberModel fm = build_model(ps, c, N);
  const int d = ps.problem.d();
  const auto per_axis = c.integer("discretization.kgrid", 8);
  if (per_axis < 1 || per_axis > 256) config_error("discretization.kgrid must lie in [1, 256]");
  const std::vector<RVec> ks = brillouin_grid(ps.problem.lattice, static_cast<int>(per_axis));
  const std::vector<double> eps = eps_list(c, {0.125}, 1);
  const std::vector<double> times = s_list(c, {0.25, 1.0, 4.0});
  const double rate = c.has("sweep.rate") ? c.real("sweep.rate", 0.0)
                                          : std::max(0.0, measured_lower_constant(fm.ctx, 8, {0.05, 0.25, 1.0}, threads));
  r.summary["rate"] = rate;
  r.summary["kgrid"] = per_axis;

  struct Job {
    double eps, s;
    std::size_t k;
  };
  std::vector<Job> jobs;
  for (double e : eps)
    for (double s : times)
      for (std::size_t i = 0; i < ks.size(); ++i) jobs.push_back({e, s, i});
  std::vector<FiberRemainder> out(jobs.size());
  std::vector<std::string> errors(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t j) {
    try {
      out[j] = fiber_remainder(fm, ks[jobs[j].k], jobs[j].eps, jobs[j].s, rate);
    } catch (const std::exception& e) {
      errors[j] = e.what();
    }
  });

  Table t;
  for (int i = 0; i < d; ++i) t.columns.push_back("k" + std::to_string(i + 1));
  for (const char* col : {"eps", "s", "remainder", "principal_error", "envelope", "ratio", "ratio_nonneg", "in_regime",
                          "max_ratio"})
    t.columns.push_back(col);
  json per_time = json::object();
  double cmax = 0.0, cmin = std::numeric_limits<double>::infinity();
  std::size_t j0 = 0;
  while (j0 < jobs.size()) {
    std::size_t j1 = j0;
    double group_max = 0.0;
    for (; j1 < jobs.size() && jobs[j1].eps == jobs[j0].eps && jobs[j1].s == jobs[j0].s; ++j1)
      if (errors[j1].empty()) group_max = std::max(group_max, out[j1].ratio_pos);
    Series series;
    for (std::size_t j = j0; j < j1; ++j) {
      const RVec& k = ks[jobs[j].k];
      if (!errors[j].empty()) {
        std::string where = "eps=" + key_number(jobs[j].eps) + " s=" + key_number(jobs[j].s) + " k=(";
        for (int i = 0; i < d; ++i) where += (i ? "," : "") + key_number(k(i));
        r.point_failed(where + ")", errors[j]);
        continue;
      }
      const FiberRemainder& fr = out[j];
      std::vector<double> row;
      for (int i = 0; i < d; ++i) row.push_back(k(i));
      row.insert(row.end(), {jobs[j].eps, jobs[j].s, fr.remainder, fr.principal_error, fr.envelope_pos, fr.ratio_pos,
                             fr.ratio_nonneg, fr.in_regime ? 1.0 : 0.0, group_max});
      t.rows.push_back(row);
      series.emplace_back(std::sqrt(k.squaredNorm() + jobs[j].eps * jobs[j].eps), fr.remainder);
    }
    std::sort(series.begin(), series.end());
    const std::string key = "eps=" + key_number(jobs[j0].eps) + " s=" + key_number(jobs[j0].s);
    r.plots["remainder_eps" + key_number(jobs[j0].eps) + "_s" + key_number(jobs[j0].s)] = series;
    per_time[key] = group_max;
    cmax = std::max(cmax, group_max);
    cmin = std::min(cmin, group_max);
    j0 = j1;
  }
  r.tables["remainder"] = t;
  r.summary["max_ratio"] = per_time;
  r.summary["fitted_constant"] = cmax;
  if (cmin > 0.0 && std::isfinite(cmin)) {
    r.at_most("envelope_constant_spread", cmax / cmin, c.real("check.envelope_spread", 10.0));
  }

  // abstract engine against the cell formulas at one point inside the threshold ball
  try {
    RVec theta = RVec::Ones(d).normalized();
    const CrossValidation cv = cross_validate_abstract(fm, theta, 0.3, 0.15, 1e-7, false);
    r.summary["cross_validation"] = {{"Z", cv.err_Z},   {"Ztilde", cv.err_Zt}, {"ZG", cv.err_ZG},
                                     {"germ", cv.err_germ}, {"L", cv.err_L},   {"N", cv.err_N}};
    const double tol = c.real("check.cross_tol", 1e-7);
    r.at_most("cross_Z", cv.err_Z, tol);
    r.at_most("cross_Ztilde", cv.err_Zt, tol);
    r.at_most("cross_L", cv.err_L, tol);
    r.at_most("cross_N", cv.err_N, c.real("check.cross_n_tol", 1e-6));
  } catch (const std::exception& e) {
    r.point_failed("cross_validation", e.what());
  }
}

// ------------------------------------------------------------ abstract-check

void abstract_check(const Config& c, Report& r, std::uint64_t seed) {
  const auto instances = c.integer("abstract.instances", 10);
  const auto max_dim = c.integer("abstract.dim", 24);
  const auto max_n = c.integer("abstract.n", 3);
  const auto steps = c.integer("abstract.tau_steps", 5);
  if (instances < 1 || max_n < 1 || max_dim < max_n + 2 || steps < 3)
    config_error("abstract: need instances >= 1, n >= 1, dim >= n + 2, tau_steps >= 3");
  const std::vector<double> need = c.reals("check.orders", {0.9, 1.8, 2.8, 3.7});
  if (need.size() != 4) config_error("check.orders needs four values");

  Table t{{"instance", "dim", "n", "order_F_P", "order_F_P_F1", "order_BF_SP", "order_BF_SP_K", "mdecomp_error",
           "nstar_norm"},
          {}};
  std::array<double, 4> worst{1e300, 1e300, 1e300, 1e300};
  double mworst = 0.0, nworst = 0.0;
  bool degenerate_seen = false;
  auto one = [&](std::int64_t i, const AbstractFamily& f) {
    const GramFamily g = GramFamily::from(f);
    const ThresholdData td = threshold(f);
    std::array<std::vector<std::pair<double, double>>, 4> s;
    for (std::int64_t j = 0; j < steps; ++j) {
      const double tau = td.tau0 * std::pow(0.5, static_cast<double>(j));
      const ProjectorReport p = threshold_projector_checks(g, td, tau, 0.8, 0.6);
      s[0].emplace_back(tau, p.norm_F_minus_P);
      s[1].emplace_back(tau, p.norm_F_minus_P_F1);
      s[2].emplace_back(tau, p.norm_BF_minus_SP);
      s[3].emplace_back(tau, p.norm_BF_minus_SP_K);
    }
    std::vector<double> row{static_cast<double>(i), static_cast<double>(f.dim_H()), static_cast<double>(td.n())};
    for (int q = 0; q < 4; ++q) {
      const double slope = fit_rate(s[static_cast<std::size_t>(q)]).slope;
      worst[static_cast<std::size_t>(q)] = std::min(worst[static_cast<std::size_t>(q)], slope);
      row.push_back(slope);
    }
    if (i == 0) {
      const char* names[] = {"F_P", "F_P_F1", "BF_SP", "BF_SP_K"};
      for (int q = 0; q < 4; ++q) r.plots[std::string("abstract0_") + names[q]] = s[static_cast<std::size_t>(q)];
    }
    const MDecompositionReport m = m_decomposition_check(g, td, 0.6 * td.tau0, 0.6, 0.8, 2.0);
    mworst = std::max(mworst, m.closed_vs_quadrature);
    degenerate_seen = degenerate_seen || m.degenerate_pair;
    row.push_back(m.closed_vs_quadrature);
    if (td.n() == 1) {
      nworst = std::max(nworst, m.nstar_norm);
      row.push_back(m.nstar_norm);
    } else {
      row.push_back(std::nan(""));
    }
    t.rows.push_back(row);
  };

  for (std::int64_t i = 0; i < instances; ++i) {
    RandomFamilySpec spec;
    spec.n = 1 + i % max_n;
    spec.dim = std::min<Index>(max_dim, spec.n + 4 + 2 * i);
    std::mt19937_64 rng(seed * 1000003ull + static_cast<std::uint64_t>(i));
    try {
      one(i, random_family(rng, spec));
    } catch (const std::exception& e) {
      r.point_failed("instance " + std::to_string(i), e.what());
    }
  }
  if (c.boolean("abstract.degenerate", true)) {
    std::mt19937_64 rng(seed * 1000003ull + 999983ull);
    RandomFamilySpec spec;
    spec.dim = 6;
    try {
      const AbstractFamily f = random_family(rng, spec);
      one(instances, direct_sum(f, f));
    } catch (const std::exception& e) {
      r.point_failed("instance " + std::to_string(instances) + " (doubled)", e.what());
    }
  }
  r.tables["instances"] = t;
  r.summary["min_orders"] = {{"F_P", worst[0]}, {"F_P_F1", worst[1]}, {"BF_SP", worst[2]}, {"BF_SP_K", worst[3]}};
  r.summary["degenerate_pair_seen"] = degenerate_seen;
  r.at_least("order_F_P", worst[0], need[0]);
  r.at_least("order_F_P_F1", worst[1], need[1]);
  r.at_least("order_BF_SP", worst[2], need[2]);
  r.at_least("order_BF_SP_K", worst[3], need[3]);
  r.at_most("mdecomp_closed_vs_quadrature", mworst, c.real("check.mdecomp_tol", 1e-9));
  r.at_most("nstar_norm_n1", nworst, c.real("check.nstar_tol", 1e-10));
}

// ------------------------------------------------------------------ converge

void check_slope(const Config& c, Report& r, const std::string& name, const RateFit& f, SweepMode mode) {
  if (f.exact_agreement) {
    r.flag("ExactAgreement");
    return;
  }
  if (mode == SweepMode::corrected)
    r.within(name, f.slope, c.real("check.slope_min", 1.75), c.real("check.slope_max", 2.25));
  else
    r.within(name, f.slope, c.real("check.principal_slope_min", 0.75), c.real("check.principal_slope_max", 1.25));
}

std::vector<SweepMode> modes_of(const Config& c) {
  const std::string m = c.str("sweep.mode", "both");
  if (m == "both") return {SweepMode::principal, SweepMode::corrected};
  return {parse_mode(m)};
}

void converge(const Config& c, const ProblemSetup& ps, Report& r, int threads, std::uint64_t seed) {
  const int N = modes(c, 8);
  summarize_problem(r, ps, N);
  const FiberModel fm = build_model(ps, c, N);
  const std::vector<double> eps = eps_list(c, {0.25, 0.125, 0.0625, 0.03125}, 3);
  const std::vector<double> times = s_list(c, {0.5});
  const std::vector<SweepMode> which = modes_of(c);
  SweepOptions o;
  o.box_length = c.real("sweep.box_length", o.box_length);
  o.probes = static_cast<int>(c.integer("sweep.probes", o.probes));
  o.probe_cutoff = c.real("sweep.probe_cutoff", o.probe_cutoff);
  o.seed = seed;
  o.threads = threads;
  o.variant = parse_variant(c);
  o.floor = c.real("check.floor", o.floor);
  o.rate = c.real("sweep.rate", -1.0);
  for (double e : eps) {
    const double cells = o.box_length / e;
    if (std::abs(cells - std::round(cells)) > 1e-9 * cells)
      config_error("sweep.box_length / eps must be an integer for every eps");
  }
  const double rate = sweep_rate(fm, o);
  r.summary["rate"] = rate;
  // the running slope follows the corrected error unless only the principal one is asked for
  const SweepMode lead = which.size() == 1 ? which.front() : SweepMode::corrected;

  Table t{{"eps", "s", "err_principal", "err_corrected", "envelope_principal", "envelope_corrected", "slope_running"},
          {}};
  json points = json::array(), fits = json::object();
  for (double s : times) {
    std::vector<std::pair<double, double>> sp, sc, lead_pts;
    for (double e : eps) {
      SweepPoint pt;
      try {
        pt = sweep_point(fm, e, s, lead, rate, o);
      } catch (const std::exception& ex) {
        r.point_failed("eps=" + key_number(e) + " s=" + key_number(s), ex.what());
        continue;
      }
      sp.emplace_back(e, pt.err_principal);
      sc.emplace_back(e, pt.err_corrected);
      lead_pts.emplace_back(e, lead == SweepMode::corrected ? pt.err_corrected : pt.err_principal);
      t.rows.push_back({e, s, pt.err_principal, pt.err_corrected, pt.envelope_principal, pt.envelope_corrected,
                        running_slope(lead_pts)});
      if (pt.proxy_disagrees) r.flag("ProxyDisagrees");
      points.push_back({{"eps", e},
                        {"s", s},
                        {"fibers", pt.fibers},
                        {"proxy_principal", pt.proxy_principal},
                        {"proxy_corrected", pt.proxy_corrected},
                        {"proxy_disagrees", pt.proxy_disagrees}});
    }
    const std::string sk = "s=" + key_number(s);
    json fs = json::object();
    for (SweepMode m : which) {
      const bool corr = m == SweepMode::corrected;
      const auto& series = corr ? sc : sp;
      const std::string label = corr ? "corrected" : "principal";
      r.plots["converge_" + label + "_s" + key_number(s)] = series;
      try {
        const RateFit f = fit_rate(series, o.floor);
        fs[label] = fit_json(f);
        check_slope(c, r, label + "_slope_" + sk, f, m);
      } catch (const std::exception& ex) {
        r.point_failed(label + " fit " + sk, ex.what());
      }
    }
    fits[sk] = fs;
  }
  r.tables["sweep"] = t;
  r.summary["fits"] = fits;
  r.summary["points"] = points;
}

// -------------------------------------------------------------------- evolve

BlochField packet(const BoxSetup& box, const Lattice& lat, double length, double centre, double width) {
  const Grid& g = box.box_grid;
  const Index n = box.fm->ctx.n();
  MatField u(n, 1, g.size());
  RVec mid = RVec::Constant(lat.d, 0.5 * length);
  for (Index i = 0; i < g.size(); ++i) {
    const auto y = g.point(i);
    RVec x(lat.d);
    for (int a = 0; a < lat.d; ++a) x(a) = length * y[static_cast<std::size_t>(a)];
    const RVec phys = lat.basis * x;
    const RVec dx = phys - lat.basis * mid;
    const cplx v = std::exp(-0.5 * dx.squaredNorm() / (width * width)) * std::exp(cplx(0.0, centre * phys(0)));
    for (Index c = 0; c < n; ++c) u.at(c, 0)(i) = v;
  }
  return bloch_decompose(box, u);
}

void evolve(const Config& c, const ProblemSetup& ps, Report& r, int threads) {
  const int N = modes(c, 6);
  summarize_problem(r, ps, N);
  const FiberModel fm = build_model(ps, c, N);
  const std::vector<double> eps = eps_list(c, {0.25, 0.125, 0.0625}, 3);
  const std::vector<double> times = s_list(c, {0.5});
  const double length = c.real("sweep.box_length", 8.0);
  const double centre = c.real("evolve.centre", 1.0);
  const double width = c.real("evolve.width", 1.0);
  const std::string source = c.str("evolve.source", "none");
  if (source != "none" && source != "decaying") config_error("evolve.source must be none or decaying");
  if (!(width > 0.0) || !(length > 0.0)) config_error("evolve.width and sweep.box_length must be positive");
  DuhamelOptions o;
  o.p_norm = c.real("evolve.p_norm", o.p_norm);
  o.steps = static_cast<int>(c.integer("evolve.steps", o.steps));
  o.tolerance = c.real("evolve.quad_tol", 1e-3);
  o.variant = parse_variant(c);
  o.threads = threads;
  const double rate = c.has("sweep.rate") ? c.real("sweep.rate", 0.0)
                                          : std::max(0.0, measured_lower_constant(fm.ctx, 8, {0.05, 0.25, 1.0}, threads));
  r.summary["rate"] = rate;
  r.summary["source"] = source;

  Table t{{"eps", "s", "err_principal", "err_corrected", "envelope_principal", "envelope_corrected", "slope_running",
           "phi_norm", "F_norm", "halving_change"},
          {}};
  json fits = json::object();
  for (double s : times) {
    std::vector<std::pair<double, double>> sp, sc, ep, ec;
    for (double e : eps) {
      try {
        const BoxSetup box = make_box_length(fm, e, length);
        const BlochField phi = packet(box, ps.problem.lattice, length, centre, width);
        Source F = [&](double) { return BlochField(phi.size(), Vec::Zero(phi.front().size())); };
        if (source == "decaying") {
          F = [&](double u) {
            BlochField b = phi;
            for (Vec& v : b) v *= std::exp(-u);
            return b;
          };
        }
        const SolutionPair sol = duhamel_solve(box, phi, F, s, rate, o);
        sp.emplace_back(e, sol.err_principal / sol.phi_norm);
        sc.emplace_back(e, sol.err_corrected / sol.phi_norm);
        ep.emplace_back(e, sol.envelope_principal);
        ec.emplace_back(e, sol.envelope_corrected);
        t.rows.push_back({e, s, sol.err_principal, sol.err_corrected, sol.envelope_principal, sol.envelope_corrected,
                          running_slope(sc), sol.phi_norm, sol.F_norm, sol.halving_change});
      } catch (const std::exception& ex) {
        r.point_failed("eps=" + key_number(e) + " s=" + key_number(s), ex.what());
      }
    }
    const std::string sk = "s=" + key_number(s);
    r.plots["evolve_principal_s" + key_number(s)] = sp;
    r.plots["evolve_corrected_s" + key_number(s)] = sc;
    // the error has to decay at least as fast as its envelope, up to a slack
    const double slack = c.real("check.envelope_slack", 0.25);
    json fs = json::object();
    for (int q = 0; q < 2; ++q) {
      const auto& err = q ? sc : sp;
      const auto& env = q ? ec : ep;
      const std::string label = q ? "corrected" : "principal";
      try {
        const RateFit fe = fit_rate(err, c.real("check.floor", 1e-13));
        const RateFit fv = fit_rate(env);
        fs[label] = fit_json(fe);
        fs[label]["envelope_slope"] = fv.slope;
        if (fe.exact_agreement) {
          r.flag("ExactAgreement");
        } else {
          r.at_least(label + "_slope_minus_envelope_" + sk, fe.slope - fv.slope, -slack);
        }
      } catch (const std::exception& ex) {
        r.point_failed(label + " fit " + sk, ex.what());
      }
    }
    fits[sk] = fs;
  }
  r.tables["evolve"] = t;
  r.summary["fits"] = fits;
}

// ------------------------------------------------------------ scalar-example

void scalar_example(const Config& c, const ProblemSetup& ps, Report& r) {
  if (!ps.scalar) config_error("scalar-example needs problem.preset = scalar_schrodinger");
  const int N = modes(c, 6);
  summarize_problem(r, ps, N);
  const ScalarInput& in = *ps.scalar;
  const ScalarEffective e = scalar_effective(in, N);
  const ScalarN sn = scalar_N_coefficients(e);
  r.summary["effective"] = {{"g0", to_json(e.g0)},
                            {"V1", to_json(e.V1)},
                            {"V2", to_json(e.V2)},
                            {"A0", to_json(e.A0)},
                            {"eta_mean", to_json(e.eta_mean)},
                            {"W", e.W},
                            {"V0", e.V0},
                            {"Qbar", e.Qbar},
                            {"lambda", e.lambda},
                            {"imag_residual", e.imag_residual}};
  r.summary["third_order"] = {
      {"N12", to_json(sn.N12)}, {"N12_raw", to_json(sn.N12_raw)}, {"N21", to_json(sn.N21)}, {"N22", sn.N22}};
  const ScalarCrossCheck x = scalar_cross_check(in, N);
  r.summary["generic_vs_closed_form"] = {
      {"effective", x.effective}, {"third_order", x.third_order}, {"corrector", x.corrector}};
  const double tol = c.real("check.scalar_tol", 1e-8);
  r.at_most("effective_data", x.effective, tol);
  r.at_most("third_order_coefficients", x.third_order, tol);
  r.at_most("commuted_corrector", x.corrector, c.real("check.corrector_tol", 1e-9));
  r.at_most("imaginary_residual", e.imag_residual, tol);
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"cell-solve", "fiber-check", "abstract-check",
                                                 "converge",   "evolve",      "scalar-example"};
  return names;
}

ProblemSetup make_problem(const Config& c, std::uint64_t seed) {
  const std::string preset = c.str("problem.preset", "oscillatory_1d");
  ProblemSetup ps;
  PeriodicProblem& p = ps.problem;
  const int d = static_cast<int>(c.integer("problem.d", preset == "scalar_schrodinger" || preset == "divergence_free" ? 2 : 1));
  const Index n = c.integer("problem.n", 1);
  if (d < 1 || d > 3) config_error("problem.d must be 1, 2 or 3");
  if (n < 1 || n > 8) config_error("problem.n must lie in [1, 8]");
  if (preset == "harmonic_1d") {
    p = preset_harmonic_1d(c.real("problem.mean", 2.0), c.real("problem.amp", 1.0));
  } else if (preset == "constant") {
    p = preset_constant(d, c.real("problem.g_value", 1.0) * Mat::Identity(d * n, d * n), 0.0, n);
  } else if (preset == "oscillatory_1d") {
    p = preset_oscillatory_1d(c.boolean("problem.lower_order", true), c.boolean("problem.weight", false));
  } else if (preset == "random_smooth") {
    RandomPresetOptions o;
    o.d = d;
    o.n = n;
    o.harmonics = static_cast<int>(c.integer("problem.harmonics", o.harmonics));
    o.amplitude = c.real("problem.amplitude", o.amplitude);
    o.lower_order = c.boolean("problem.lower_order", false);
    o.weight = c.boolean("problem.weight", false);
    o.seed = static_cast<std::uint64_t>(c.integer("problem.coef_seed", static_cast<std::int64_t>(seed)));
    p = preset_random_smooth(o);
  } else if (preset == "divergence_free") {
    p = preset_divergence_free(cplx(c.real("problem.a1_re", 0.0), c.real("problem.a1_im", 0.0)),
                               cplx(c.real("problem.a2_re", 0.0), c.real("problem.a2_im", 0.0)));
  } else if (preset == "scalar_schrodinger") {
    ScalarPresetOptions o;
    o.d = d;
    o.g_amp = c.real("problem.g_amp", o.g_amp);
    o.A_amp = c.real("problem.A_amp", o.A_amp);
    o.v_amp = c.real("problem.v_amp", o.v_amp);
    o.V_amp = c.real("problem.V_amp", o.V_amp);
    ps.scalar = preset_scalar_schrodinger(o);
    p = build_scalar_problem(*ps.scalar);
  } else if (preset == "grid") {
    const auto gpath = c.path("problem.g_file");
    if (!gpath) config_error("preset grid needs problem.g_file");
    auto [grid, g] = read_grid_file(*gpath);
    const Index m = grid.d * n;
    if (g.rows != m) throw Error(ErrorCode::DataError, "g file holds " + std::to_string(g.rows) +
                                                           " x " + std::to_string(g.rows) + " values, expected m = " +
                                                           std::to_string(m));
    p.name = "grid";
    p.lattice = cubic_lattice(grid.d);
    p.n = n;
    p.m = m;
    p.b = gradient_symbol(grid.d, n);
    p.g = CoefField::from_samples(grid, std::move(g));
    auto side = [&](const char* key) -> std::optional<CoefField> {
      const auto path = c.path(key);
      if (!path) return std::nullopt;
      auto [sg, f] = read_grid_file(*path);
      if (sg.d != grid.d) throw Error(ErrorCode::DataError, std::string(key) + ": dimension differs from g");
      if (f.rows != n) throw Error(ErrorCode::DataError, std::string(key) + ": expected n x n values");
      return CoefField::from_samples(sg, std::move(f));
    };
    p.f = side("problem.f_file");
    p.Q = side("problem.q_file");
  } else {
    config_error("unknown problem.preset '" + preset + "'");
  }

  const std::string lam = c.str("problem.lambda", "auto");
  if (lam == "auto") {
    p.lambda = admissible_lambda(p, 4);
  } else {
    try {
      std::size_t used = 0;
      p.lambda = std::stod(lam, &used);
      if (used != lam.size()) throw std::invalid_argument(lam);
    } catch (const std::exception&) {
      config_error("problem.lambda must be a number or 'auto'");
    }
  }
  if (ps.scalar) ps.scalar->lambda = p.lambda;
  return ps;
}

Report run(const Config& c, int threads, std::uint64_t seed) {
  const std::string cmd = c.str("run.command", "");
  Report r;
  r.summary["command"] = cmd;
  if (cmd == "abstract-check") {
    abstract_check(c, r, seed);
    return r;
  }
  if (std::find(command_names().begin(), command_names().end(), cmd) == command_names().end())
    config_error("unknown command '" + cmd + "'");
  const std::string default_preset = cmd == "scalar-example" ? "scalar_schrodinger" : "oscillatory_1d";
  Config cc = c;
  if (!cc.has("problem.preset")) cc.set("problem.preset", default_preset);
  const ProblemSetup ps = make_problem(cc, seed);
  try {
    if (cmd == "cell-solve") cell_solve(cc, ps, r);
    if (cmd == "fiber-check") fiber_check(cc, ps, r, threads);
    if (cmd == "converge") converge(cc, ps, r, threads, seed);
    if (cmd == "evolve") evolve(cc, ps, r, threads);
    if (cmd == "scalar-example") scalar_example(cc, ps, r);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::DataError) throw;
    r.point_failed("pipeline", e.what());
  }
  return r;
}

int run_cli(const std::string& command, const std::string& config_path, const Overrides& ov, std::ostream& log) {
  try {
    Config c = Config::load(config_path);
    const std::string in_file = c.str("run.command", command);
    if (in_file != command) config_error("config names command '" + in_file + "' but '" + command + "' was requested");
    c.set("run.command", command);
    if (ov.out) c.set("run.out", *ov.out);
    if (ov.threads) c.set("run.threads", std::to_string(*ov.threads));
    if (ov.seed) c.set("run.seed", std::to_string(*ov.seed));
    const int threads = static_cast<int>(c.integer("run.threads", 0));
    const auto seed = static_cast<std::uint64_t>(c.integer("run.seed", 1));
    const std::string out = c.str("run.out", "homog-out");

    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    const Report r = run(c, threads, seed);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json settings = json::object();
    for (const auto& [k, v] : c.values())
      if (k != "run.out" && k != "run.threads") settings[k] = v;
    const json meta = {{"config_hash", c.hash()},
                       {"config", settings},
                       {"modes", c.integer("discretization.modes", 0)},
                       {"seed", seed}};
    r.write(out, meta, c.boolean("run.svg", false));
    // wall-clock data lives apart from the reproducible outputs
    const json timing = {{"started", started}, {"finished", utc_now()}, {"seconds", wall},
                         {"threads", threads > 0 ? threads : default_threads()}};
    std::ofstream(out + "/timing.json") << timing.dump(2) << "\n";

    for (const Check& ch : r.checks())
      log << (ch.pass ? "pass " : "FAIL ") << ch.name << " = " << ch.value << "\n";
    log << (r.passed() ? "all checks passed" : "invariant failure") << ", report in " << out << "\n";
    return r.passed() ? 0 : 1;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::DataError ? 2 : 1;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace homog::harness
