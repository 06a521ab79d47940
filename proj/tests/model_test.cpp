#include "gred/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "gred/error.hpp"
#include "oracles.hpp"

namespace {

using gred::BetaShape;
using gred::ControlParams;
using gred::NormalizedModel;

// Frozen root of the fixed-point cubic for the reference system, p_max = 0.5.
constexpr double kXStarReference = 0.39121881375383269;

NormalizedModel reference_model(double p_max = 0.5, BetaShape shape = {1.0, 1.0}) {
  ControlParams c;
  c.p_max = p_max;
  c.shape = shape;
  return gred::normalize(gred::SystemParams::reference(), c);
}

struct RandomModels {
  std::mt19937_64 rng;
  explicit RandomModels(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

  // Random admissible model; retries until construction succeeds.
  NormalizedModel next() {
    for (;;) {
      ControlParams c;
      c.x_min = uniform(0.0, 0.5);
      c.x_max = uniform(c.x_min + 0.05, 1.0);
      c.w = uniform(0.01, 0.99);
      c.p_max = uniform(0.05, 1.0);
      c.shape = BetaShape(uniform(0.2, 4.0), uniform(0.2, 4.0));
      const double a2 = uniform(0.2, 3.0);
      const double a1 = uniform(0.1, a2 + 0.99);
      try {
        return gred::make_model(a1, a2, c);
      } catch (const gred::ConstraintError&) {
      }
    }
  }
};

TEST(Normalize, ReferenceConstants) {
  const auto m = reference_model();
  EXPECT_NEAR(m.a2(), 1.926, 1e-12);
  EXPECT_NEAR(m.a1() * std::sqrt(0.5), 1850.0 * std::sqrt(1.5) / 2000.0, 1e-12);
  EXPECT_NEAR(m.a1() * std::sqrt(0.5), 1.133, 5e-4);
}

TEST(Normalize, ThetasForUniformShape) {
  const auto m = reference_model();
  const double a1 = m.a1();
  const double a2 = m.a2();
  EXPECT_NEAR(m.theta_l(), 0.4 * (a1 / (a2 + 1)) * (a1 / (a2 + 1)) + 0.2, 1e-14);
  EXPECT_NEAR(m.theta_r(), 0.4 * (a1 / a2) * (a1 / a2) + 0.2, 1e-14);
  EXPECT_TRUE(m.continuous_at_theta_r());
  EXPECT_EQ(m.excess(), 0.0);
}

TEST(Normalize, ThetaRClampsToXMax) {
  ControlParams c;
  const auto m = gred::make_model(2.2, 1.926, c);
  EXPECT_EQ(m.theta_r(), c.x_max);
  EXPECT_FALSE(m.continuous_at_theta_r());
  EXPECT_NEAR(m.excess(), 2.2 - 1.926, 1e-15);
}

TEST(Normalize, ConstraintViolationsThrow) {
  ControlParams c;
  EXPECT_THROW(gred::make_model(3.0, 1.926, c), gred::ConstraintError);
  EXPECT_THROW(gred::make_model(2.926, 1.926, c), gred::ConstraintError);
  EXPECT_THROW(gred::make_model(-1.0, 1.926, c), std::invalid_argument);
  EXPECT_THROW(gred::make_model(1.0, 0.0, c), std::invalid_argument);
  c.p_max = 0.1;
  EXPECT_THROW(gred::normalize(gred::SystemParams::reference(), c), gred::ConstraintError);
}

TEST(Normalize, ConstraintThresholdInPmax) {
  // A1 < A2 + 1 flips at p_max = (NK / (B (A2 + 1)))^2.
  const auto sys = gred::SystemParams::reference();
  const double flip = std::pow(sys.connections * sys.k_const / (sys.buffer * 2.926), 2.0);
  ControlParams c;
  c.p_max = flip * 1.001;
  EXPECT_NO_THROW(gred::normalize(sys, c));
  c.p_max = flip * 0.999;
  EXPECT_THROW(gred::normalize(sys, c), gred::ConstraintError);
  EXPECT_NEAR(flip, 0.1499, 1e-3);
}

TEST(Normalize, ControlValidation) {
  ControlParams c;
  c.x_min = 0.7;
  EXPECT_THROW(gred::make_model(1.0, 1.5, c), std::invalid_argument);
  c = ControlParams{};
  c.w = 0.0;
  EXPECT_THROW(gred::make_model(1.0, 1.5, c), std::invalid_argument);
  c = ControlParams{};
  c.p_max = 1.5;
  EXPECT_THROW(gred::make_model(1.0, 1.5, c), std::invalid_argument);
}

TEST(Model, ZAndDropProbability) {
  const auto m = reference_model(0.5, BetaShape(0.6, 0.4));
  EXPECT_EQ(m.z_of(0.2), 0.0);
  EXPECT_EQ(m.z_of(0.6), 1.0);
  EXPECT_NEAR(m.z_of(0.4), 0.5, 1e-15);
  EXPECT_THROW(m.z_of(0.1), std::domain_error);
  EXPECT_EQ(m.drop_prob(0.1), 0.0);
  EXPECT_EQ(m.drop_prob(0.9), 0.5);
  EXPECT_NEAR(m.drop_prob(0.4), 0.5 * 0.38409193448439446903, 1e-12);
}

TEST(Model, ValueAtReferencePoint) {
  const auto m = reference_model();
  // Direct evaluation of the core branch with I(z) = z.
  const double a1 = 1850.0 * std::sqrt(1.5) / (std::sqrt(0.5) * 2000.0);
  const double expected = 0.85 * 0.4 + 0.15 * (a1 / std::sqrt(0.5) - 1.926);
  EXPECT_NEAR(m(0.4), expected, 1e-14);
  EXPECT_NEAR(m(0.4), 0.390967, 1e-6);
}

TEST(Model, LinearBranches) {
  const auto m = reference_model();
  EXPECT_NEAR(m(0.0), 0.15, 1e-15);
  EXPECT_NEAR(m(1.0), 0.85, 1e-15);
  EXPECT_NEAR(m(0.1), 0.85 * 0.1 + 0.15, 1e-15);
  EXPECT_NEAR(m(0.9), 0.85 * 0.9, 1e-15);
  EXPECT_NEAR(m(m.theta_l()), 0.85 * m.theta_l() + 0.15, 1e-15);
}

TEST(Model, ContinuousAtThetaLAndThetaR) {
  const auto m = reference_model(0.5, BetaShape(0.6, 0.4));
  const double eps = 1e-10;
  EXPECT_NEAR(m(m.theta_l() + eps), m(m.theta_l()), 1e-6);
  EXPECT_NEAR(m(m.theta_r() - eps), m(m.theta_r()), 1e-6);
}

TEST(Model, JumpAtThetaRWhenDiscontinuous) {
  ControlParams c;
  c.shape = BetaShape(2.0, 0.5);
  const auto m = gred::make_model(2.3, 1.926, c);
  const double left = m.value_left_of_theta_r();
  EXPECT_NEAR(left - m(m.theta_r()), c.w * (2.3 - 1.926), 1e-12);
  EXPECT_NEAR(m(m.theta_r() - 1e-12), left, 1e-6);
}

TEST(Model, DerivativeAtReferencePoint) {
  const auto m = reference_model();
  const double expected = 1.0 - 0.15 * (1.0 + m.a1() / (2.0 * 0.4) / std::pow(0.5, 1.5));
  EXPECT_NEAR(m.derivative(0.4), expected, 1e-13);
  EXPECT_NEAR(m.derivative(0.4), 3.3325e-4, 1e-7);
}

TEST(Model, DerivativeMatchesFiniteDifference) {
  for (BetaShape shape : {BetaShape(1, 1), BetaShape(0.6, 0.4), BetaShape(3, 2), BetaShape(0.5, 2)}) {
    const auto m = reference_model(0.5, shape);
    auto f = [&m](double x) { return m(x); };
    for (int i = 1; i < 100; ++i) {
      const double x = m.theta_l() + (m.theta_r() - m.theta_l()) * i / 100.0;
      const double h = 1e-7 * (m.theta_r() - m.theta_l());
      const double fd = gred::oracle::central_difference(f, x, h);
      EXPECT_NEAR(m.derivative(x), fd, 1e-5 * std::max(1.0, std::abs(fd)))
          << "alpha=" << shape.alpha() << " beta=" << shape.beta() << " x=" << x;
    }
  }
}

TEST(Model, OneSidedDerivatives) {
  const auto m = reference_model();
  EXPECT_EQ(m.derivative(m.theta_l(), gred::Side::Left), 0.85);
  EXPECT_EQ(m.derivative(m.theta_r(), gred::Side::Right), 0.85);
  EXPECT_NEAR(m.derivative(m.theta_l(), gred::Side::Right),
              m.derivative(m.theta_l() + 1e-9), 1e-5);

  ControlParams c;
  c.shape = BetaShape(2.0, 0.5);
  const auto jump = gred::make_model(2.3, 1.926, c);
  EXPECT_EQ(jump.derivative(jump.theta_r(), gred::Side::Left),
            -std::numeric_limits<double>::infinity());
}

TEST(Model, SecondDerivativeMatchesFiniteDifference) {
  for (BetaShape shape : {BetaShape(1, 1), BetaShape(0.6, 0.4), BetaShape(3, 2)}) {
    const auto m = reference_model(0.5, shape);
    auto fp = [&m](double x) { return m.derivative(x); };
    for (int i = 5; i < 96; i += 5) {
      const double x = m.theta_l() + (m.theta_r() - m.theta_l()) * i / 100.0;
      const double fd = gred::oracle::central_difference(fp, x, 1e-6);
      EXPECT_NEAR(m.second_derivative(x), fd, 1e-4 * std::max(1.0, std::abs(fd)))
          << "alpha=" << shape.alpha() << " beta=" << shape.beta() << " x=" << x;
    }
  }
}

TEST(Model, SecondDerivativePositiveForUniformShape) {
  const auto m = reference_model();
  for (int i = 1; i < 100; ++i) {
    EXPECT_GT(m.second_derivative(m.theta_l() + (m.theta_r() - m.theta_l()) * i / 100.0), 0.0);
  }
  EXPECT_THROW(m.second_derivative(m.theta_l()), std::domain_error);
  EXPECT_THROW(m.second_derivative(0.9), std::domain_error);
}

TEST(FixedPoint, ReferenceValue) {
  const auto m = reference_model();
  const auto fp = gred::fixed_point(m);
  ASSERT_TRUE(fp.has_value());
  EXPECT_NEAR(fp->x_star, kXStarReference, 1e-9);
  EXPECT_NEAR(fp->x_star, gred::oracle::uniform_fixed_point(m.a1(), m.a2(), 0.2, 0.6), 1e-9);
  EXPECT_LT(fp->residual, 1e-9);
}

TEST(FixedPoint, QuadraticCaseAgreesWithClosedForm) {
  const auto m = reference_model(0.5, BetaShape(2.0, 1.0));
  const auto fp = gred::fixed_point(m);
  ASSERT_TRUE(fp.has_value());
  EXPECT_NEAR(fp->x_star, gred::oracle::quadratic_fixed_point(m.a1(), m.a2(), 0.2, 0.6), 1e-9);
}

TEST(FixedPoint, AbsentWhenA1ExceedsA2PlusXMax) {
  ControlParams c;
  const auto m = gred::make_model(1.926 + 0.6 + 0.01, 1.926, c);
  EXPECT_FALSE(gred::fixed_point(m).has_value());
  const auto ok = gred::make_model(1.926 + 0.6 - 0.01, 1.926, c);
  EXPECT_TRUE(gred::fixed_point(ok).has_value());
}

TEST(FixedPoint, IndependentOfW) {
  const auto m = reference_model(0.5, BetaShape(0.6, 0.4));
  const double x = gred::fixed_point(m)->x_star;
  for (double w : {0.01, 0.3, 0.7, 0.99}) {
    EXPECT_NEAR(gred::fixed_point(m.with_w(w))->x_star, x, 1e-11);
  }
}

TEST(FixedPoint, ComparativeStatics) {
  ControlParams c;
  const double base = gred::fixed_point(gred::make_model(1.6, 1.9, c))->x_star;
  EXPECT_GT(gred::fixed_point(gred::make_model(1.7, 1.9, c))->x_star, base);
  EXPECT_LT(gred::fixed_point(gred::make_model(1.6, 2.0, c))->x_star, base);
  c.x_max = 0.65;
  EXPECT_GT(gred::fixed_point(gred::make_model(1.6, 1.9, c))->x_star, base);
}

TEST(ModelProperty, RangeWithinUnitInterval) {
  RandomModels gen(101);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = gen.next();
    for (int i = 0; i <= 200; ++i) {
      const double y = m(i / 200.0);
      EXPECT_GE(y, 0.0);
      EXPECT_LE(y, 1.0);
    }
  }
}

TEST(ModelProperty, JumpSizeAtThetaR) {
  RandomModels gen(202);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = gen.next();
    const double jump = m.value_left_of_theta_r() - m(m.theta_r());
    EXPECT_NEAR(jump, m.w() * std::max(0.0, m.a1() - m.a2()), 1e-12);
  }
}

TEST(ModelProperty, CoreSlopeBelowLinearSlope) {
  RandomModels gen(303);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = gen.next();
    for (int i = 1; i < 50; ++i) {
      const double x = m.theta_l() + (m.theta_r() - m.theta_l()) * i / 50.0;
      if (x <= m.theta_l() || x >= m.theta_r()) continue;
      EXPECT_LT(m.derivative(x), 1.0 - m.w());
    }
  }
}

TEST(ModelProperty, FixedPointSolvesEquation) {
  RandomModels gen(404);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = gen.next();
    const auto fp = gred::fixed_point(m);
    ASSERT_EQ(fp.has_value(), m.a1() < m.a2() + m.controls().x_max);
    if (!fp) continue;
    EXPECT_GT(fp->x_star, m.theta_l());
    EXPECT_LT(fp->x_star, m.theta_r());
    EXPECT_LT(fp->residual, 1e-9);
  }
}

}  // namespace
