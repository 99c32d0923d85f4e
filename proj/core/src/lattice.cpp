#include "homog/lattice.hpp"

#include "homog/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace homog {
namespace {

std::vector<RVec> integer_box(int d, int radius) {
  std::vector<RVec> out;
  const int side = 2 * radius + 1;
  int total = 1;
  for (int i = 0; i < d; ++i) total *= side;
  for (int idx = 0; idx < total; ++idx) {
    RVec v(d);
    int rem = idx;
    for (int i = d - 1; i >= 0; --i) {
      v(i) = rem % side - radius;
      rem /= side;
    }
    if (v.squaredNorm() > 0) out.push_back(v);
  }
  return out;
}

bool is_rectangular(const RMat& basis) {
  const RMat g = basis.transpose() * basis;
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      if (i != j && std::abs(g(i, j)) > 1e-14 * std::sqrt(g(i, i) * g(j, j))) return false;
  return true;
}

// Vertices of the Voronoi cell of 0 in the lattice spanned by `dual`:
// intersections of d bisector planes satisfying every bisector inequality.
double max_vertex_norm(const RMat& dual) {
  const int d = static_cast<int>(dual.rows());
  std::vector<RVec> normals;
  for (const RVec& c : integer_box(d, 2)) normals.push_back(dual * c);
  const std::size_t k = normals.size();
  auto feasible = [&](const RVec& x) {
    for (const RVec& v : normals)
      if (x.dot(v) > 0.5 * v.squaredNorm() * (1.0 + 1e-10) + 1e-12) return false;
    return true;
  };
  double best = 0.0;
  std::vector<std::size_t> pick(static_cast<std::size_t>(d));
  // enumerate d-subsets
  std::function<void(std::size_t, int)> rec = [&](std::size_t start, int depth) {
    if (depth == d) {
      RMat a(d, d);
      RVec rhs(d);
      for (int i = 0; i < d; ++i) {
        a.row(i) = normals[pick[static_cast<std::size_t>(i)]].transpose();
        rhs(i) = 0.5 * normals[pick[static_cast<std::size_t>(i)]].squaredNorm();
      }
      Eigen::FullPivLU<RMat> lu(a);
      if (!lu.isInvertible()) return;
      const RVec x = lu.solve(rhs);
      if (feasible(x)) best = std::max(best, x.norm());
      return;
    }
    for (std::size_t i = start; i < k; ++i) {
      pick[static_cast<std::size_t>(depth)] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace

RVec Lattice::to_brillouin(const RVec& p) const {
  // First reduce to the unit parallelepiped around 0, then try neighbouring shifts.
  RVec q = p;
  for (int i = 0; i < d; ++i) q(i) -= std::floor(q(i) + 0.5);  // [-1/2, 1/2), idempotent
  RVec best = q;
  double best_norm = (dual * q).squaredNorm();
  for (const RVec& c : integer_box(d, 1)) {
    const RVec cand = q - c;
    const double nrm = (dual * cand).squaredNorm();
    if (nrm < best_norm * (1.0 - 1e-12)) {
      best = cand;
      best_norm = nrm;
    }
  }
  return best;
}

Lattice build_lattice(const RMat& basis) {
  if (basis.rows() != basis.cols() || basis.rows() < 1 || basis.rows() > 3)
    throw Error(ErrorCode::InvalidInput, "lattice basis must be d x d with d in {1,2,3}");
  const double det = basis.determinant();
  double scale = 1.0;
  for (Eigen::Index j = 0; j < basis.cols(); ++j) scale *= basis.col(j).norm();
  if (!(std::abs(det) > 1e-12 * scale)) throw Error(ErrorCode::SingularBasis, "basis vectors are dependent");

  Lattice lat;
  lat.d = static_cast<int>(basis.rows());
  lat.basis = basis;
  lat.dual = 2.0 * M_PI * basis.inverse().transpose();
  lat.cell_volume = std::abs(det);

  if (is_rectangular(basis)) {
    double shortest = std::numeric_limits<double>::infinity(), sq = 0.0;
    for (int j = 0; j < lat.d; ++j) {
      const double h = 0.5 * lat.dual.col(j).norm();
      shortest = std::min(shortest, h);
      sq += h * h;
    }
    lat.r0 = shortest;
    lat.r1 = std::sqrt(sq);
  } else {
    double shortest = std::numeric_limits<double>::infinity();
    for (const RVec& c : integer_box(lat.d, 2)) shortest = std::min(shortest, (lat.dual * c).norm());
    lat.r0 = 0.5 * shortest;
    lat.r1 = max_vertex_norm(lat.dual);
  }
  return lat;
}

Lattice cubic_lattice(int d) { return build_lattice(RMat::Identity(d, d)); }

}  // namespace homog
