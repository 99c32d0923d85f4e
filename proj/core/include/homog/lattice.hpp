#pragma once

#include "homog/linalg.hpp"

namespace homog {

/// Periodicity lattice spanned by the columns of `basis` (d x d, d in {1,2,3}).
struct Lattice {
  int d = 1;
  RMat basis;  // columns a_j
  RMat dual;   // columns b^l with <b^l, a_j> = 2 pi delta
  double cell_volume = 1.0;
  double r0 = 0.0;  // radius of the ball inscribed in the Brillouin zone
  double r1 = 0.0;  // half its diameter

  /// Wavevector dual * p for integer (or fractional) reduced coordinates p.
  RVec wavevector(const RVec& p) const { return dual * p; }
  /// Reduced dual coordinates shifted by an integer vector into the Brillouin zone.
  RVec to_brillouin(const RVec& p) const;
};

/// Throws SingularBasis if |det basis| is below tolerance.
Lattice build_lattice(const RMat& basis);

Lattice cubic_lattice(int d);

}  // namespace homog
