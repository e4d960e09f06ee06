#include <gtest/gtest.h>

#include "obo/errors.hpp"
#include "obo/oracle_check.hpp"
#include "support.hpp"

namespace obo {
namespace {

TEST(CheckOracle, QuadraticPassesTightly) {
  const StreamPtr stream = make_stream(test::quadratic_config(3));
  Rng rng(5);
  const ConsistencyReport report = check_oracle(*stream->round(1), rng.normal_vector(5), rng.normal_vector(5));
  EXPECT_TRUE(report.passed);
  EXPECT_LT(report.max_relative_error(), 1e-6);
  EXPECT_NE(report.find("grad_g_y"), nullptr);
}

TEST(CheckOracle, IdentityInnerProblem) {
  // f = 0, g = 1/2 |y|^2
  test::SeparableOracle oracle(3, 2, 0.0, 0.0, Vector::Zero(2), Vector::Zero(2));
  Rng rng(1);
  const Vector x = rng.normal_vector(3), y = rng.normal_vector(2), v = rng.normal_vector(2);
  EXPECT_TRUE(check_oracle(oracle, x, y).passed);
  EXPECT_EQ(oracle.grad_f_x(x, y), Vector::Zero(3));
  EXPECT_EQ(oracle.hess_g_yy_vec(x, y, v), v);
}

TEST(CheckOracle, DetectsDoubledGradient) {
  const StreamPtr stream = make_stream(test::quadratic_config(3));
  const test::DoubledGradOracle faulty(stream->round(1));
  Rng rng(8);
  const ConsistencyReport report = check_oracle(faulty, rng.normal_vector(5), rng.normal_vector(5));
  EXPECT_FALSE(report.passed);
  const ConsistencyItem* item = report.find("grad_f_x");
  ASSERT_NE(item, nullptr);
  EXPECT_FALSE(item->passed);
  EXPECT_NEAR(item->relative_error, 1.0, 1e-5);
}

TEST(CheckOracle, RejectsBadInputs) {
  const StreamPtr stream = make_stream(test::quadratic_config(3));
  const OraclePtr oracle = stream->round(1);
  EXPECT_THROW(check_oracle(*oracle, Vector::Zero(4), Vector::Zero(5)), DimensionError);
  Vector bad = Vector::Zero(5);
  bad[2] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(check_oracle(*oracle, bad, Vector::Zero(5)), NumericalError);
  OracleCheckOptions options;
  options.eps = 0.5;
  EXPECT_THROW(check_oracle(*oracle, Vector::Zero(5), Vector::Zero(5), options), ArgumentError);
}

TEST(CheckOracle, EveryFamilyPassesAtRandomPoints) {
  for (const StreamConfig& cfg : {test::quadratic_config(21), test::hr_config(21), test::ho_config(21)}) {
    const StreamPtr stream = make_stream(cfg);
    Rng rng(99);
    for (int probe = 0; probe < 20; ++probe) {
      const OraclePtr oracle = stream->round(1 + probe % 5);
      const Vector x = test::random_outer(*stream, rng);
      const Vector y = rng.normal_vector(stream->dim_y());
      const ConsistencyReport report = check_oracle(*oracle, x, y);
      ASSERT_TRUE(report.passed) << to_string(cfg.family) << " probe " << probe << " max err "
                                 << report.max_relative_error();
    }
  }
}

}  // namespace
}  // namespace obo
