#include "support.hpp"

#include <gtest/gtest.h>

using namespace chvirial;
using namespace testing_support;

TEST(PeriodicGrid, RejectsBadSizes) {
  EXPECT_THROW(PeriodicGrid(8, 1.0), Error);
  EXPECT_THROW(PeriodicGrid(48, 1.0), Error);
  EXPECT_THROW(PeriodicGrid(64, 0.0), Error);
  EXPECT_THROW(PeriodicGrid(64, -1.0), Error);
  EXPECT_NO_THROW(PeriodicGrid(16, 1.0));
}

TEST(PeriodicGrid, NodesAreEquallySpaced) {
  const PeriodicGrid g(64, 10.0);
  EXPECT_DOUBLE_EQ(g.node(0), -5.0);
  for (std::size_t j = 1; j < g.size(); ++j) EXPECT_NEAR(g.node(j) - g.node(j - 1), 10.0 / 64, 1e-14);
  EXPECT_LT(g.node(63), 5.0);
}

TEST(Field, RejectsWrongLength) {
  const PeriodicGrid g(16, 1.0);
  EXPECT_THROW(Field(g, std::vector<double>(15)), Error);
}

TEST(Derivative, SingleModeIsExact) {
  const PeriodicGrid g(64, 7.0);
  const double k = 2 * kPi / g.length();
  const Field f = Field::sample(g, [&](double x) { return std::sin(k * x); });
  const Field exact = Field::sample(g, [&](double x) { return k * std::cos(k * x); });
  EXPECT_LE(max_diff(derivative(f, 1), exact), 1e-12);
}

TEST(Derivative, ConstantHasZeroDerivative) {
  const PeriodicGrid g(32, 3.0);
  EXPECT_LE(derivative(Field::constant(g, 1.0), 1).max_abs(), 1e-15);
}

TEST(Derivative, GaussianSecondDerivative) {
  const PeriodicGrid g(512, 40.0);
  const Field f = Field::sample(g, [](double x) { return std::exp(-x * x); });
  const Field exact = Field::sample(g, [](double x) { return (4 * x * x - 2) * std::exp(-x * x); });
  EXPECT_LE(max_diff(derivative(f, 2), exact), 1e-9);
}

TEST(Derivative, RejectsNonFiniteAndBadOrder) {
  const PeriodicGrid g(16, 1.0);
  Field f(g);
  EXPECT_THROW(derivative(f, 0), Error);
  EXPECT_THROW(derivative(f, 4), Error);
  f[5] = std::nan("");
  try {
    derivative(f, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("index 5"), std::string::npos);
  }
}

TEST(Quadrature, Examples) {
  EXPECT_NEAR(quadrature(Field::constant(PeriodicGrid(16, 10.0), 1.0)), 10.0, 1e-13);
  const PeriodicGrid g(64, 5.0);
  EXPECT_NEAR(quadrature(Field::sample(g, [&](double x) { return std::sin(2 * kPi * x / 5.0); })), 0.0,
              1e-15);
  const PeriodicGrid h(512, 40.0);
  EXPECT_NEAR(quadrature(Field::sample(h, [](double x) { return std::exp(-x * x); })), std::sqrt(kPi),
              1e-12);
}

TEST(Dealias, Examples) {
  const PeriodicGrid g(64, 2 * kPi);
  const Field low = Field::sample(g, [](double x) { return std::sin(x); });
  EXPECT_LE(max_diff(dealias(low), low), 1e-14);
  const Field nyq = Field::sample(g, [](double x) { return std::cos(32 * x); });
  EXPECT_LE(dealias(nyq).max_abs(), 1e-14);
  std::mt19937_64 rng(7);
  const Field r = random_band_limited(g, 16, rng);
  EXPECT_LE(max_diff(dealias(r), r), 1e-13);
}

TEST(Dealias, KeepsModeAtCutoffDropsAbove) {
  const PeriodicGrid g(64, 2 * kPi);
  const Field at = Field::sample(g, [](double x) { return std::cos(21 * x); });
  const Field above = Field::sample(g, [](double x) { return std::cos(22 * x); });
  EXPECT_LE(max_diff(dealias(at), at), 1e-13);
  EXPECT_LE(dealias(above).max_abs(), 1e-13);
}

class GridProperties : public ::testing::TestWithParam<int> {};

TEST_P(GridProperties, DiscreteCalculus) {
  std::mt19937_64 rng(1000 + GetParam());
  const PeriodicGrid g(256, 30.0);
  const Field f = random_band_limited(g, 100, rng, 0.5);
  const Field h = random_band_limited(g, 100, rng, -0.2);
  const double norm = std::sqrt(quadrature(f * f));
  EXPECT_LE(std::abs(quadrature(derivative(f, 1))), 1e-12 * norm);

  const double lhs = quadrature(f * derivative(h, 1));
  const double rhs = -quadrature(derivative(f, 1) * h);
  EXPECT_LE(std::abs(lhs - rhs), 1e-11 * std::max(1.0, std::abs(lhs)));

  const Field d11 = derivative(derivative(f, 1), 1);
  const Field d2 = derivative(f, 2);
  EXPECT_LE(max_diff(d11, d2), 1e-12 * d2.max_abs());
}

INSTANTIATE_TEST_SUITE_P(RandomFields, GridProperties, ::testing::Range(0, 20));
