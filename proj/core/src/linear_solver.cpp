#include "obo/linear_solver.hpp"

#include <algorithm>
#include <cmath>

namespace obo {

LinearMap LinearMap::from_matrix(Matrix m) {
  if (m.rows() != m.cols()) throw DimensionError("LinearMap::from_matrix: matrix is not square");
  const Eigen::Index n = m.rows();
  return LinearMap(n, [m = std::move(m)](const Vector& v) -> Vector { return m * v; });
}

int q_at(const QSchedule& schedule, long t) {
  if (t < 1) throw ArgumentError("q_at: round index must be >= 1");
  const double raw = static_cast<double>(t - 1) * schedule.q_increment;
  // Products such as 3 * 0.1 land a hair above the integer they represent.
  const double grown = std::ceil(raw - 1e-12 * std::max(1.0, raw));
  const double q = static_cast<double>(schedule.q0) + grown;
  return static_cast<int>(std::min<double>(schedule.q_max, q));
}

Vector solve_fixed_step(const LinearMap& map, const Vector& rhs, const Vector& v0, double lambda,
                        int q) {
  require_dim(rhs, map.dim(), "solve_fixed_step rhs");
  require_dim(v0, map.dim(), "solve_fixed_step v0");
  if (!(lambda > 0.0)) throw ArgumentError("solve_fixed_step: lambda must be > 0");
  if (q < 0) throw ArgumentError("solve_fixed_step: q must be >= 0");

  Vector v = v0;
  for (int k = 0; k < q; ++k) {
    v -= lambda * (map(v) - rhs);
    if (!v.allFinite()) throw NumericalError("solve_fixed_step: non-finite iterate", k + 1);
  }
  return v;
}

CgResult solve_cg_detailed(const LinearMap& map, const Vector& rhs, const Vector& v0, int max_iters,
                           double tol) {
  require_dim(rhs, map.dim(), "solve_cg rhs");
  require_dim(v0, map.dim(), "solve_cg v0");
  if (max_iters < 0) throw ArgumentError("solve_cg: max_iters must be >= 0");
  if (!(tol >= 0.0)) throw ArgumentError("solve_cg: tol must be >= 0");

  CgResult out;
  out.solution = v0;
  Vector r = rhs - map(v0);
  const double target = tol * rhs.norm();
  double rr = r.squaredNorm();
  out.residual_norm = std::sqrt(rr);
  if (out.residual_norm <= target) return out;

  Vector p = r;
  for (int k = 0; k < max_iters; ++k) {
    const Vector ap = map(p);
    const double curvature = p.dot(ap);
    if (!(curvature > 0.0)) {
      throw SolverBreakdown("solve_cg: non-positive curvature at iteration " + std::to_string(k + 1));
    }
    const double step = rr / curvature;
    out.solution += step * p;
    r -= step * ap;
    const double rr_next = r.squaredNorm();
    out.iterations = k + 1;
    out.residual_norm = std::sqrt(rr_next);
    if (!std::isfinite(rr_next)) throw NumericalError("solve_cg: non-finite residual", k + 1);
    if (out.residual_norm <= target) break;
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return out;
}

}  // namespace obo
