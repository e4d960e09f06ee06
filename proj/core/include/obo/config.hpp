#pragma once

#include <string>
#include <variant>
#include <vector>

#include "obo/oracle.hpp"
#include "obo/types.hpp"

namespace obo {

struct NoDomain {};

struct BallDomain {
  Vector center;
  double radius = 1.0;
};

struct BoxDomain {
  Vector lo;
  Vector hi;
};

// Feasible set for the outer variable.
using Domain = std::variant<NoDomain, BallDomain, BoxDomain>;

enum class SolverKind { fixed_step, conjugate_gradient };

const char* to_string(SolverKind kind);
SolverKind solver_kind_from_string(const std::string& name);

struct OptimizerConfig {
  double alpha = 0.3;           // inner stepsize
  double beta = 0.02;           // outer stepsize
  double eta = 0.99;            // window decay, in (0, 1]
  int k_window = 10;            // window length K
  double lambda_solver = 0.3;   // linear-solver stepsize
  int q0 = 5;                   // linear-solver iterations at round 1
  double q_increment = 0.25;    // per-round growth of the iteration count
  int q_max = 50;               // cap on the iteration count
  int n_inner = 1;              // inner steps per round (OAGD only)
  Domain domain = NoDomain{};
  SolverKind solver_kind = SolverKind::fixed_step;
  // Start each linear solve from the previous round's solution instead of zero.
  bool warm_start = false;

  // Throws ConfigError when the structural invariants are violated.
  void check() const;
};

struct ConditionCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationResult {
  std::vector<ConditionCheck> checks;

  bool all_passed() const;
};

// Checks the stepsize/window/schedule conditions under which the regret
// guarantee holds. Purely advisory: callers log failures and keep running.
ValidationResult validate_config(const OptimizerConfig& cfg, const RegularityConstants& constants);

// Smallest per-round growth of the solver iteration count for which the
// linear-solve error keeps pace with the inner contraction.
double required_q_increment(double alpha, double lambda_solver, double mu_g);

}  // namespace obo
