#include <cmath>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "obo/errors.hpp"
#include "obo/linear_solver.hpp"
#include "support.hpp"

namespace obo {
namespace {

LinearMap diag_map(std::initializer_list<double> entries) {
  Vector d(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (double e : entries) d[i++] = e;
  return LinearMap::from_matrix(d.asDiagonal());
}

TEST(FixedStep, IdentityOneStepIsExact) {
  const Vector rhs = (Vector(3) << 1.5, -2.0, 0.25).finished();
  const Vector v = solve_fixed_step(diag_map({1, 1, 1}), rhs, Vector::Zero(3), 1.0, 1);
  EXPECT_EQ(v, rhs);
}

TEST(FixedStep, ZeroIterationsReturnsStart) {
  const Vector v0 = (Vector(2) << 3.0, 4.0).finished();
  EXPECT_EQ(solve_fixed_step(diag_map({1, 2}), Vector::Ones(2), v0, 0.5, 0), v0);
}

TEST(FixedStep, DiagonalSystemMatchesGeometricRecursion) {
  const Vector v = solve_fixed_step(diag_map({1, 2}), (Vector(2) << 1, 2).finished(), Vector::Zero(2), 0.5, 30);
  // Per coordinate v_k = (b/a)(1 - (1 - lambda a)^k): 1 - 2^-30 and exactly 1.
  EXPECT_DOUBLE_EQ(v[0], 1.0 - 0x1p-30);
  EXPECT_DOUBLE_EQ(v[1], 1.0);
  EXPECT_NEAR(v[0], 1.0, 1e-6);
}

TEST(FixedStep, NonFiniteReportsIteration) {
  // lambda far above 2/L diverges until overflow.
  try {
    solve_fixed_step(diag_map({1e10}), Vector::Ones(1), Vector::Zero(1), 1.0, 100);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_GT(e.iteration(), 0);
  }
}

TEST(FixedStep, DimensionMismatchThrows) {
  EXPECT_THROW(solve_fixed_step(diag_map({1, 2}), Vector::Ones(3), Vector::Zero(2), 0.5, 1), DimensionError);
}

TEST(FixedStep, Deterministic) {
  Rng rng(11);
  const Matrix a = test::random_spd(rng, 8, 0.5, 3.0);
  const Vector b = rng.normal_vector(8);
  const auto map = LinearMap::from_matrix(a);
  EXPECT_EQ(solve_fixed_step(map, b, Vector::Zero(8), 0.3, 25), solve_fixed_step(map, b, Vector::Zero(8), 0.3, 25));
}

TEST(Cg, IdentityConvergesInOneIteration) {
  const Vector rhs = (Vector(4) << 1, -2, 3, -4).finished();
  const CgResult r = solve_cg_detailed(diag_map({1, 1, 1, 1}), rhs, Vector::Zero(4), 10, 1e-12);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_LT((r.solution - rhs).norm(), 1e-14);
}

TEST(Cg, ZeroRhsReturnsZeroImmediately) {
  const CgResult r = solve_cg_detailed(diag_map({1, 2}), Vector::Zero(2), Vector::Zero(2), 10, 1e-10);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.solution, Vector::Zero(2));
}

TEST(Cg, RandomSpdMatchesDenseLu) {
  Rng rng(2024);
  const Matrix a = test::random_spd(rng, 10, 0.3, 5.0);
  const Vector b = rng.normal_vector(10);
  const Vector direct = a.partialPivLu().solve(b);
  const Vector v = solve_cg(LinearMap::from_matrix(a), b, Vector::Zero(10), 10, 1e-10);
  EXPECT_LT((v - direct).norm() / direct.norm(), 1e-8);
}

TEST(Cg, IndefiniteMapBreaksDown) {
  EXPECT_THROW(solve_cg(diag_map({1, -1}), (Vector(2) << 0, 1).finished(), Vector::Zero(2), 5, 0.0), SolverBreakdown);
}

TEST(QSchedule, ConstantWithoutIncrement) {
  const QSchedule s{5, 0.0, 50};
  for (long t : {1L, 2L, 77L, 100000L}) EXPECT_EQ(q_at(s, t), 5);
}

TEST(QSchedule, ArithmeticExample) {
  // 5 + ceil(8 * 0.25) = 7
  EXPECT_EQ(q_at(QSchedule{5, 0.25, 100}, 9), 7);
}

TEST(QSchedule, Capped) { EXPECT_EQ(q_at(QSchedule{5, 1.0, 10}, 100), 10); }

TEST(QSchedule, RejectsRoundZero) { EXPECT_THROW(q_at(QSchedule{}, 0), ArgumentError); }

TEST(QSchedule, NonDecreasingWithFloorGrowth) {
  for (double inc : {0.0, 0.1, 0.25, 0.5, 1.0, 1.7, 3.0}) {
    const QSchedule s{2, inc, 400};
    for (long t = 1; t < 300; ++t) {
      const int now = q_at(s, t), next = q_at(s, t + 1);
      ASSERT_GE(next, now) << "inc " << inc << " t " << t;
      if (next < s.q_max) {
        ASSERT_GE(next - now, static_cast<int>(std::floor(inc))) << "inc " << inc << " t " << t;
      }
    }
  }
}

}  // namespace
}  // namespace obo
