#include "obo/hypergrad.hpp"

#include <cmath>

#include "obo/linear_solver.hpp"
#include "obo/oracle_check.hpp"

namespace obo {

namespace {

LinearMap inner_hessian(const RoundOracle& oracle, const Vector& x, const Vector& y) {
  return LinearMap(oracle.dim_y(), [&oracle, &x, &y](const Vector& v) { return oracle.hess_g_yy_vec(x, y, v); });
}

}  // namespace

HypergradRecord estimate_hypergrad(const RoundOracle& oracle, const Vector& x, const Vector& y_est,
                                   const OptimizerConfig& cfg, int q, const Vector& v0) {
  require_dim(x, oracle.dim_x(), "estimate_hypergrad x");
  require_dim(y_est, oracle.dim_y(), "estimate_hypergrad y");
  require_dim(v0, oracle.dim_y(), "estimate_hypergrad v0");
  if (q < 0) throw ArgumentError("estimate_hypergrad: q must be >= 0");

  const LinearMap hessian = inner_hessian(oracle, x, y_est);
  const Vector rhs = oracle.grad_f_y(x, y_est);

  HypergradRecord record;
  record.round = oracle.round_index();
  record.solver_iters = q;
  switch (cfg.solver_kind) {
    case SolverKind::fixed_step:
      record.v_q = solve_fixed_step(hessian, rhs, v0, cfg.lambda_solver, q);
      break;
    case SolverKind::conjugate_gradient: {
      CgResult cg = solve_cg_detailed(hessian, rhs, v0, q, 0.0);
      record.v_q = std::move(cg.solution);
      record.solver_iters = cg.iterations;
      break;
    }
  }
  record.grad = oracle.grad_f_x(x, y_est) - oracle.cross_g_xy_vec(x, y_est, record.v_q);
  require_finite(record.grad, "estimate_hypergrad");
  return record;
}

namespace {

// A few Newton steps from a point already inside the gradient-descent
// tolerance. Each step is kept only if it lowers the gradient norm, so the
// result is never worse than the input.
Vector newton_polish(const RoundOracle& oracle, const Vector& x, Vector y, double gnorm) {
  const int budget = static_cast<int>(std::max<Eigen::Index>(10 * oracle.dim_y(), 100));
  for (int step = 0; step < 3 && gnorm > 0.0; ++step) {
    const Vector grad = oracle.grad_g_y(x, y);
    Vector d;
    try {
      d = solve_cg(inner_hessian(oracle, x, y), grad, Vector::Zero(y.size()), budget, 1e-14);
    } catch (const NumericalError&) {
      break;
    }
    const Vector candidate = y - d;
    const double cnorm = oracle.grad_g_y(x, candidate).norm();
    if (!(cnorm < gnorm)) break;
    y = candidate;
    gnorm = cnorm;
  }
  return y;
}

}  // namespace

Vector inner_solve(const RoundOracle& oracle, const Vector& x, double tol, int max_iters,
                   const Vector* y_init) {
  if (!(tol > 0.0)) throw ArgumentError("inner_solve: tol must be > 0");
  if (max_iters < 0) throw ArgumentError("inner_solve: max_iters must be >= 0");
  require_dim(x, oracle.dim_x(), "inner_solve x");

  Vector y = y_init ? *y_init : Vector::Zero(oracle.dim_y());
  const double step = 1.0 / oracle.inner_lipschitz(x);
  Vector grad = oracle.grad_g_y(x, y);
  for (int k = 0;; ++k) {
    const double gnorm = grad.norm();
    if (!std::isfinite(gnorm)) throw NumericalError("inner_solve: non-finite gradient", k);
    if (gnorm <= tol * (1.0 + y.norm())) return newton_polish(oracle, x, std::move(y), gnorm);
    if (k >= max_iters) throw ConvergenceError("inner_solve: iteration budget exhausted", gnorm);
    y -= step * grad;
    grad = oracle.grad_g_y(x, y);
  }
}

Vector inner_solution(const RoundOracle& oracle, const Vector& x, const InnerSolveOptions& inner) {
  if (oracle.has_exact_inner()) return oracle.y_star(x);
  if (inner.max_iters <= 0) {
    throw OracleCapabilityError("oracle has no closed-form inner solution and no inner solve was requested");
  }
  return inner_solve(oracle, x, inner.tol, inner.max_iters);
}

ExactHypergrad exact_hypergrad_detailed(const RoundOracle& oracle, const Vector& x,
                                        const ExactHypergradOptions& options) {
  require_dim(x, oracle.dim_x(), "exact_hypergrad x");
  ExactHypergrad out;
  out.y_star = inner_solution(oracle, x, options.inner);
  const Vector rhs = oracle.grad_f_y(x, out.y_star);
  const LinearMap hessian = inner_hessian(oracle, x, out.y_star);
  // CG on an n-dimensional SPD system terminates in n steps in exact arithmetic;
  // the extra budget absorbs round-off.
  const int budget = static_cast<int>(std::max<Eigen::Index>(10 * oracle.dim_y(), 100));
  const CgResult cg = solve_cg_detailed(hessian, rhs, Vector::Zero(oracle.dim_y()), budget, options.solve_tol);
  out.v_star = cg.solution;
  out.grad = oracle.grad_f_x(x, out.y_star) - oracle.cross_g_xy_vec(x, out.y_star, out.v_star);
  require_finite(out.grad, "exact_hypergrad");
  return out;
}

Vector fd_hypergrad(const RoundOracle& oracle, const Vector& x, double eps, double inner_tol) {
  if (!(eps > 1e-8 && eps < 1e-2)) throw ArgumentError("fd_hypergrad: eps out of range");
  require_dim(x, oracle.dim_x(), "fd_hypergrad x");
  const InnerSolveOptions inner{inner_tol, 200000};
  const bool exact = oracle.has_exact_inner();
  // Perturbed inner solves start from the unperturbed solution.
  const Vector base = exact ? Vector() : inner_solve(oracle, x, inner.tol, inner.max_iters);
  auto composite = [&](const Vector& p) {
    const Vector y = exact ? oracle.y_star(p) : inner_solve(oracle, p, inner.tol, inner.max_iters, &base);
    return oracle.f_value(p, y);
  };
  return central_difference(composite, x, eps);
}

}  // namespace obo
