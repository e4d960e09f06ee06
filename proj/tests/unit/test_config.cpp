#include <cmath>

#include <gtest/gtest.h>

#include "obo/config.hpp"
#include "obo/errors.hpp"

namespace obo {
namespace {

const ConditionCheck& find(const ValidationResult& r, const std::string& prefix) {
  for (const auto& c : r.checks) {
    if (c.name.rfind(prefix, 0) == 0) return c;
  }
  throw std::runtime_error("no check " + prefix);
}

TEST(ValidateConfig, EtaConditionWithUnitConstants) {
  OptimizerConfig cfg;
  cfg.alpha = 1.0;
  cfg.lambda_solver = 1.0;
  cfg.eta = 0.99;
  const ValidationResult r = validate_config(cfg, {1.0, 1.0, 0.0});
  EXPECT_TRUE(find(r, "eta").passed);
  EXPECT_TRUE(find(r, "alpha").passed);
  EXPECT_TRUE(find(r, "lambda").passed);
}

TEST(ValidateConfig, AlphaAboveInverseLipschitzFails) {
  OptimizerConfig cfg;
  cfg.alpha = 2.0;
  const ValidationResult r = validate_config(cfg, {0.5, 1.0, 0.0});
  EXPECT_FALSE(find(r, "alpha").passed);
  EXPECT_FALSE(r.all_passed());
}

TEST(ValidateConfig, EtaOneAlwaysPasses) {
  OptimizerConfig cfg;
  cfg.eta = 1.0;
  EXPECT_TRUE(find(validate_config(cfg, {1.0, 2.0, 0.0}), "eta").passed);
}

TEST(ValidateConfig, EtaBelowFloorFails) {
  OptimizerConfig cfg;
  cfg.alpha = 0.1;
  cfg.eta = 0.9;  // floor is 1 - 0.1 * 1 / 2 = 0.95
  EXPECT_FALSE(find(validate_config(cfg, {1.0, 2.0, 0.0}), "eta").passed);
}

TEST(ValidateConfig, RequiredQIncrementExample) {
  const double required = required_q_increment(0.1, 0.1, 0.5);
  // log(0.975) / (2 log(0.95)), evaluated independently.
  EXPECT_NEAR(required, std::log(0.975) / (2.0 * std::log(0.95)), 1e-15);
  EXPECT_NEAR(required, 0.2468, 1e-4);
  OptimizerConfig cfg;
  cfg.alpha = 0.1;
  cfg.lambda_solver = 0.1;
  cfg.q_increment = 0.25;
  EXPECT_TRUE(find(validate_config(cfg, {0.5, 1.0, 0.0}), "q_increment").passed);
  cfg.q_increment = 0.24;
  EXPECT_FALSE(find(validate_config(cfg, {0.5, 1.0, 0.0}), "q_increment").passed);
}

TEST(ValidateConfig, ListsEveryCondition) { EXPECT_EQ(validate_config(OptimizerConfig{}, {}).checks.size(), 4u); }

TEST(OptimizerConfigCheck, RejectsStructuralViolations) {
  auto expect_bad = [](auto mutate) {
    OptimizerConfig cfg;
    mutate(cfg);
    EXPECT_THROW(cfg.check(), ConfigError);
  };
  expect_bad([](OptimizerConfig& c) { c.eta = 0.0; });
  expect_bad([](OptimizerConfig& c) { c.eta = 1.5; });
  expect_bad([](OptimizerConfig& c) { c.k_window = 0; });
  expect_bad([](OptimizerConfig& c) { c.q_max = 2; });
  expect_bad([](OptimizerConfig& c) { c.n_inner = 0; });
  expect_bad([](OptimizerConfig& c) { c.lambda_solver = 0.0; });
  expect_bad([](OptimizerConfig& c) { c.alpha = -1.0; });
  OptimizerConfig ok;
  EXPECT_NO_THROW(ok.check());
}

TEST(OptimizerConfigCheck, MalformedDomains) {
  OptimizerConfig cfg;
  cfg.domain = BallDomain{Vector::Zero(2), 0.0};
  EXPECT_THROW(cfg.check(), DomainError);
  cfg.domain = BoxDomain{Vector::Ones(2), Vector::Zero(2)};
  EXPECT_THROW(cfg.check(), DomainError);
}

TEST(SolverKindNames, RoundTrip) {
  EXPECT_EQ(solver_kind_from_string("fixed_step"), SolverKind::fixed_step);
  EXPECT_EQ(solver_kind_from_string(to_string(SolverKind::conjugate_gradient)), SolverKind::conjugate_gradient);
  EXPECT_EQ(solver_kind_from_string("cg"), SolverKind::conjugate_gradient);
  EXPECT_THROW(solver_kind_from_string("newton"), ConfigError);
}

}  // namespace
}  // namespace obo
