#include "obo/config.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace obo {

const char* to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::fixed_step:
      return "fixed_step";
    case SolverKind::conjugate_gradient:
      return "conjugate_gradient";
  }
  return "?";
}

SolverKind solver_kind_from_string(const std::string& name) {
  if (name == "fixed_step") return SolverKind::fixed_step;
  if (name == "conjugate_gradient" || name == "cg") return SolverKind::conjugate_gradient;
  throw ConfigError("unknown solver kind '" + name + "'");
}

void OptimizerConfig::check() const {
  auto fail = [](const std::string& msg) { throw ConfigError("optimizer config: " + msg); };
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) fail("alpha must be finite and >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) fail("beta must be finite and >= 0");
  if (!(eta > 0.0 && eta <= 1.0)) fail("eta must lie in (0, 1]");
  if (k_window < 1) fail("k_window must be >= 1");
  if (!(lambda_solver > 0.0) || !std::isfinite(lambda_solver)) fail("lambda_solver must be > 0");
  if (q0 < 0) fail("q0 must be >= 0");
  if (!(q_increment >= 0.0) || !std::isfinite(q_increment)) fail("q_increment must be >= 0");
  if (q_max < q0) fail("q_max must be >= q0");
  if (n_inner < 1) fail("n_inner must be >= 1");
  if (const auto* ball = std::get_if<BallDomain>(&domain)) {
    if (!(ball->radius > 0.0)) throw DomainError("ball radius must be > 0");
  } else if (const auto* box = std::get_if<BoxDomain>(&domain)) {
    if (box->lo.size() != box->hi.size()) throw DomainError("box bounds differ in dimension");
    if ((box->lo.array() > box->hi.array()).any()) throw DomainError("box has lo > hi");
  }
}

bool ValidationResult::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

double required_q_increment(double alpha, double lambda_solver, double mu_g) {
  const double inner = 1.0 - alpha * mu_g / 2.0;
  const double solver = 1.0 - lambda_solver * mu_g;
  if (solver <= 0.0) return 0.0;  // one solver step is already exact or better
  if (inner <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (inner >= 1.0) return 0.0;
  return std::log(inner) / (2.0 * std::log(solver));
}

ValidationResult validate_config(const OptimizerConfig& cfg, const RegularityConstants& constants) {
  ValidationResult out;
  auto add = [&](std::string name, bool ok, std::string detail) {
    out.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
  };

  const double inv_l1 = 1.0 / constants.l1;
  add("alpha <= 1/l1", cfg.alpha <= inv_l1, "alpha=" + fmt(cfg.alpha) + ", 1/l1=" + fmt(inv_l1));
  add("lambda_solver <= 1/l1", cfg.lambda_solver <= inv_l1,
      "lambda=" + fmt(cfg.lambda_solver) + ", 1/l1=" + fmt(inv_l1));

  const double eta_floor = 1.0 - cfg.alpha * constants.mu_g / 2.0;
  const bool eta_ok = cfg.eta <= 1.0 && (cfg.eta == 1.0 || cfg.eta > eta_floor);
  add("eta in (1 - alpha*mu_g/2, 1]", eta_ok,
      "eta=" + fmt(cfg.eta) + ", lower bound=" + fmt(eta_floor));

  const double required = required_q_increment(cfg.alpha, cfg.lambda_solver, constants.mu_g);
  const bool q_ok = std::isfinite(required) && cfg.q_increment >= required;
  add("q_increment >= log(1-alpha*mu_g/2) / (2 log(1-lambda*mu_g))", q_ok,
      "q_increment=" + fmt(cfg.q_increment) + ", required=" + fmt(required));
  return out;
}

}  // namespace obo
