#pragma once

#include "obo/config.hpp"
#include "obo/oracle.hpp"

namespace obo {

// One round's estimated hypergradient, as stored in the window memory.
struct HypergradRecord {
  long round = 1;
  Vector grad;          // estimate at (x_t, y_{t+1})
  Vector v_q;           // approximate solution of the Hessian system
  int solver_iters = 0;
};

// Approximate implicit differentiation at (x, y_est):
//   v_Q  ~ [hess_yy g(x, y_est)]^{-1} grad_y f(x, y_est), q solver iterations from v0
//   grad = grad_x f(x, y_est) - cross_g_xy(x, y_est) v_Q
HypergradRecord estimate_hypergrad(const RoundOracle& oracle, const Vector& x, const Vector& y_est,
                                   const OptimizerConfig& cfg, int q, const Vector& v0);

struct InnerSolveOptions {
  double tol = 1e-10;
  int max_iters = 200000;
};

// Gradient descent on y -> g(x, y) with stepsize 1/L until
// |grad_y g| <= tol (1 + |y|). Throws ConvergenceError when the budget runs out.
Vector inner_solve(const RoundOracle& oracle, const Vector& x, double tol, int max_iters,
                   const Vector* y_init = nullptr);

// y*(x), exact when the oracle has it, otherwise inner_solve with `inner`.
// Throws OracleCapabilityError when neither is available (inner.max_iters == 0).
Vector inner_solution(const RoundOracle& oracle, const Vector& x, const InnerSolveOptions& inner);

struct ExactHypergradOptions {
  double solve_tol = 1e-12;
  // Used only when the oracle has no closed-form inner solution. max_iters == 0
  // disables the fallback.
  InnerSolveOptions inner{};
};

struct ExactHypergrad {
  Vector grad;
  Vector y_star;
  Vector v_star;
};

// grad_x f(x, y*) - cross_g_xy(x, y*) v*, with hess_yy g(x, y*) v* = grad_y f(x, y*).
ExactHypergrad exact_hypergrad_detailed(const RoundOracle& oracle, const Vector& x,
                                        const ExactHypergradOptions& options = {});

inline Vector exact_hypergrad(const RoundOracle& oracle, const Vector& x, double solve_tol = 1e-12) {
  ExactHypergradOptions options;
  options.solve_tol = solve_tol;
  return exact_hypergrad_detailed(oracle, x, options).grad;
}

// Central differences of x -> f(x, y*(x)), re-solving the inner problem at
// every perturbed point.
Vector fd_hypergrad(const RoundOracle& oracle, const Vector& x, double eps = 1e-5,
                    double inner_tol = 1e-10);

}  // namespace obo
