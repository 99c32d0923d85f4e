#pragma once

// Parabolic flows on a periodic box of N_cells^d cells of size eps.
//
// A box field with band-limited Fourier series splits into Bloch fibers: box
// frequency q = cells (p - shift) + r carries cell mode p at quasimomentum
// k = B_dual (r / cells - shift), reduced into the Brillouin zone. In physical
// units that frequency is (xi_p + k) / eps, and e^{-B_eps s} acts on the fiber
// as e^{-B(k, eps) s / eps^2}. Norms are root-mean-square over the box.

#include "homog/fiber_analysis.hpp"
#include "homog/rate.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string>

namespace homog {

enum class CorrectorVariant { with_smoothing, without_smoothing };

struct BoxSetup {
  const FiberModel* fm = nullptr;
  double eps = 1.0;
  int cells = 1;
  Grid box_grid;            // cells * M points per axis
  std::vector<RVec> k;      // quasimomentum per fiber
  std::vector<IVec> residue;
  std::vector<IVec> shift;
  Mat gal_LG, gal_LTG;      // multiplication by Lambda_G, LambdaT_G on cell modes

  Index fibers() const { return static_cast<Index>(k.size()); }
  Index fiber_dim() const { return fm->ctx.dim(); }
  /// Box frequency of mode p in fiber f.
  IVec frequency(Index f, Index p) const;
  /// |xi_p + k_f| / eps
  double physical_frequency(Index f, Index p) const;
};

BoxSetup make_box(const FiberModel& fm, double eps, int cells);
/// cells = length / eps, which must be an integer (InvalidInput otherwise).
BoxSetup make_box_length(const FiberModel& fm, double eps, double length);

using BlochField = std::vector<Vec>;

/// n x 1 field on the box grid -> fiber coefficients (frequencies outside the
/// truncation are dropped).
BlochField bloch_decompose(const BoxSetup& box, const MatField& u);
MatField bloch_synthesize(const BoxSetup& box, const BlochField& b);
double l2_norm(const BlochField& b);
BlochField operator-(const BlochField& a, const BlochField& b);
BlochField operator+(const BlochField& a, const BlochField& b);

/// Sharp cutoff to frequencies in (Brillouin zone) / eps.
MatField smoothing_apply(const BoxSetup& box, const MatField& u);
BlochField smoothing_apply(const BoxSetup& box, const BlochField& u);

/// Per-fiber propagators with cached eigendecompositions.
class FiberPropagator {
 public:
  FiberPropagator(const BoxSetup& box, Index fiber);

  Mat fine_matrix(double s) const;
  Mat homogenized_matrix(double s) const;
  Mat corrector_matrix(double s, CorrectorVariant v) const;

  Vec fine(const Vec& phi, double s) const;
  Vec homogenized(const Vec& phi, double s) const;
  Vec corrector(const Vec& phi, double s, CorrectorVariant v) const;
  /// integral over u in [a, b] of the flow at time s - u, applied to F.
  Vec fine_segment(const Vec& F, double a, double b, double s) const;
  Vec homogenized_segment(const Vec& F, double a, double b, double s) const;

  double min_fine_eigenvalue() const { return fine_.values(0); }

 private:
  Mat mode_flow(Index p, double s) const;  // f0 e^{-B0(k + xi_p) s'} f0
  Mat mode_integral(Index p, double s) const;
  const BoxSetup* box_;
  Index fiber_;
  RVec k_;
  HermEig fine_;
  std::vector<HermEig> hom_;
};

BlochField evolve_fine(const BoxSetup& box, const BlochField& phi, double s, int threads = 0);
BlochField evolve_homogenized(const BoxSetup& box, const BlochField& phi, double s, int threads = 0);
/// eps K_eps(s) phi. Throws RegimeViolation for without_smoothing and s < eps^2.
BlochField corrector_apply(const BoxSetup& box, const BlochField& phi, double s, CorrectorVariant v,
                           int threads = 0);

struct DuhamelOptions {
  double p_norm = std::numeric_limits<double>::infinity();
  int steps = 32;           // midpoint steps; the check reruns with 2 * steps
  double tolerance = 1e-6;  // relative change allowed under step halving
  CorrectorVariant variant = CorrectorVariant::with_smoothing;
  int threads = 0;
};

struct SolutionPair {
  BlochField u_eps, u0, corrector;
  double err_principal = 0.0;   // ||u_eps - u0||
  double err_corrected = 0.0;   // ||u_eps - u0 - corrector||
  double phi_norm = 0.0, F_norm = 0.0;  // F in L_p((0, s); L_2)
  double envelope_principal = 0.0, envelope_corrected = 0.0;
  double halving_change = 0.0;
  bool source_corrector = false;  // p > 2
};

using Source = std::function<BlochField(double)>;

/// u_eps, u0 and the corrected approximation for a source F. The source enters the
/// corrector only for p > 2. Throws QuadratureUnderResolved when step halving moves
/// the result by more than the tolerance.
SolutionPair duhamel_solve(const BoxSetup& box, const BlochField& phi, const Source& F, double s, double rate,
                           const DuhamelOptions& opt = {});

/// theta_1(eps, p) and eps^{2/p'} theta_2(eps, p) of the source estimates.
double source_rate_principal(double eps, double p);
double source_rate_corrected(double eps, double p);

enum class SweepMode { principal, corrected };

struct SweepOptions {
  double box_length = 16.0;
  int probes = 32;
  double probe_cutoff = 2.0 * M_PI * 2.0;  // physical frequency radius of the probe centres
  std::uint64_t seed = 1;
  int threads = 0;
  CorrectorVariant variant = CorrectorVariant::with_smoothing;
  double floor = 1e-13;
  double rate = -1.0;  // envelope decay constant; measured when negative
};

struct SweepPoint {
  double eps = 0, s = 0;
  double err_principal = 0, err_corrected = 0;      // exact box norms
  double proxy_principal = 0, proxy_corrected = 0;  // random probe maxima
  double envelope_principal = 0, envelope_corrected = 0;
  bool proxy_disagrees = false;  // exact > 2 x proxy
  Index fibers = 0;
};

struct SweepReport {
  SweepMode mode = SweepMode::corrected;
  std::vector<SweepPoint> points;
  RateFit principal, corrected;
  double rate = 0.0;
  const RateFit& fit() const { return mode == SweepMode::principal ? principal : corrected; }
};

/// Envelope decay constant: opt.rate, or measured on an 8-point k-grid when negative.
double sweep_rate(const FiberModel& fm, const SweepOptions& opt);

/// One sweep point: exact box supremum plus the probe proxy.
SweepPoint sweep_point(const FiberModel& fm, double eps, double s, SweepMode mode, double rate,
                       const SweepOptions& opt = {});

/// Throws InsufficientDecades for fewer than three eps values and InvalidInput if they
/// are not strictly decreasing.
SweepReport convergence_sweep(const FiberModel& fm, const std::vector<double>& eps_list, double s, SweepMode mode,
                              const SweepOptions& opt = {});

}  // namespace homog
