#pragma once

#include <functional>

#include "obo/types.hpp"

namespace obo {

// Symmetric positive-definite operator known only through its action.
class LinearMap {
 public:
  using Apply = std::function<Vector(const Vector&)>;

  LinearMap(Eigen::Index dim, Apply apply) : dim_(dim), apply_(std::move(apply)) {
    if (dim <= 0) throw ArgumentError("LinearMap: dimension must be positive");
  }

  static LinearMap from_matrix(Matrix m);

  Eigen::Index dim() const { return dim_; }
  Vector operator()(const Vector& v) const { return apply_(v); }

 private:
  Eigen::Index dim_;
  Apply apply_;
};

// Iteration budget Q(t) = min(q_max, q0 + ceil((t - 1) * q_increment)).
struct QSchedule {
  int q0 = 5;
  double q_increment = 0.25;
  int q_max = 50;
};

int q_at(const QSchedule& schedule, long t);

// Fixed-stepsize iteration v <- v - lambda * (map(v) - rhs), exactly q times.
// For spectrum [mu, L] and lambda <= 1/L the error contracts by (1 - lambda mu)
// per iteration.
Vector solve_fixed_step(const LinearMap& map, const Vector& rhs, const Vector& v0, double lambda,
                        int q);

struct CgResult {
  Vector solution;
  int iterations = 0;
  double residual_norm = 0.0;
};

// Conjugate gradient from v0. Stops at the first iterate with
// |rhs - map(v)| <= tol * |rhs|, or after max_iters iterations.
CgResult solve_cg_detailed(const LinearMap& map, const Vector& rhs, const Vector& v0, int max_iters,
                           double tol);

inline Vector solve_cg(const LinearMap& map, const Vector& rhs, const Vector& v0, int max_iters,
                       double tol) {
  return solve_cg_detailed(map, rhs, v0, max_iters, tol).solution;
}

}  // namespace obo
