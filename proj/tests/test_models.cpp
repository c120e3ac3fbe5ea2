#include "support.hpp"

#include <gtest/gtest.h>

using namespace chvirial;
using namespace testing_support;

namespace {

ModelSpec model(Family f) {
  ModelSpec m;
  m.family = f;
  return m;
}

constexpr Family kFamilies[] = {Family::CH, Family::DP, Family::BFamily, Family::ElasticRod,
                                Family::GBBM, Family::GBBM_MovingFrame};

}  // namespace

TEST(ModelSpec, Validation) {
  ModelSpec m = model(Family::BFamily);
  for (double b : {0.0, 3.0, -1.0}) {
    m.b = b;
    EXPECT_THROW(m.validate(), Error) << b;
  }
  m.b = 1.5;
  EXPECT_NO_THROW(m.validate());
  m = model(Family::ElasticRod);
  m.gamma = 3.5;
  EXPECT_THROW(m.validate(), Error);
  m = model(Family::GBBM);
  m.p = 1;
  EXPECT_THROW(m.validate(), Error);
  EXPECT_THROW(rhs(m, Field(PeriodicGrid(16, 1.0))), Error);
}

TEST(ModelSpec, FamilyNamesRoundTrip) {
  for (Family f : kFamilies) EXPECT_EQ(family_from_string(to_string(f)), f);
  EXPECT_THROW(family_from_string("KdV"), Error);
}

TEST(Rhs, ZeroAndConstant) {
  const PeriodicGrid g(64, 20.0);
  for (Family f : kFamilies) EXPECT_EQ(rhs(model(f), Field(g)).max_abs(), 0.0);
  EXPECT_LE(rhs(model(Family::CH), Field::constant(g, 1.7)).max_abs(), 1e-14);
}

TEST(Rhs, PeakonTravelsAwayFromCrest) {
  const PeriodicGrid g(8192, 100.0);
  const Field u = Field::sample(g, [](double x) { return std::exp(-std::abs(x)); });
  const Field r = rhs(model(Family::CH), u) + derivative(u, 1);
  double worst = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (std::abs(g.node(j)) >= 0.5) worst = std::max(worst, std::abs(r[j]));
  }
  EXPECT_LE(worst, 0.05);
}

TEST(Rhs, FamilyConsistency) {
  std::mt19937_64 rng(7);
  const PeriodicGrid g(512, 60.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Field u = random_localized(g, 60, 5.0, rng);
    const Field ch = rhs(model(Family::CH), u);
    ModelSpec bf = model(Family::BFamily);
    bf.b = 2.0;
    ModelSpec er = model(Family::ElasticRod);
    er.gamma = 1.0;
    EXPECT_LE(max_diff(rhs(bf, u), ch), 1e-12 * ch.max_abs());
    EXPECT_LE(max_diff(rhs(er, u), ch), 1e-12 * ch.max_abs());
  }
}

TEST(Rhs, ConservativeAndFrameRelation) {
  std::mt19937_64 rng(13);
  const PeriodicGrid g(512, 60.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Field u = random_localized(g, 60, 5.0, rng);
    for (Family f : {Family::CH, Family::DP, Family::BFamily, Family::ElasticRod, Family::GBBM}) {
      EXPECT_LE(std::abs(quadrature(rhs(model(f), u))), 1e-11) << to_string(f);
    }
    for (int p : {2, 3, 4}) {
      ModelSpec lab = model(Family::GBBM);
      ModelSpec mov = model(Family::GBBM_MovingFrame);
      lab.p = mov.p = p;
      EXPECT_LE(max_diff(rhs(mov, u), rhs(lab, u) + derivative(u, 1)), 1e-12);
    }
  }
}

TEST(Rhs, DpMatchesDirectForm) {
  const PeriodicGrid g(256, 40.0);
  const Field u = Field::sample(g, [](double x) { return std::exp(-x * x / 4); });
  const Field sq = dealias(u * u);
  const Field expect = -0.5 * derivative(sq + 3.0 * helmholtz_inverse(sq), 1);
  EXPECT_LE(max_diff(rhs(model(Family::DP), u), expect), 1e-13);
}

TEST(Rhs, GreenKernelSpotCheck) {
  const PeriodicGrid g(1024, 80.0);
  const Field u = Field::sample(g, [](double x) { return std::exp(-x * x / 8) * std::cos(x / 2); });
  const Field ux = derivative(u, 1);
  const Field nl = dealias(u * u + 0.5 * (ux * ux));
  const Field green =
      -1.0 * derivative(dealias(0.5 * (u * u)) + helmholtz_inverse(nl, {1.0, HelmholtzPath::GreenKernel}), 1);
  EXPECT_LE(max_diff(rhs(model(Family::CH), u), green), 1e-8);
}

TEST(WaveBreakingGuard, Examples) {
  const PeriodicGrid g(8192, 100.0);
  EXPECT_TRUE(wave_breaking_guard(Field(g), 10.0));
  const Field peakon = Field::sample(g, [](double x) { return std::exp(-std::abs(x)); });
  EXPECT_TRUE(wave_breaking_guard(peakon, 10.0));
  Field bad = peakon;
  bad[17] = std::nan("");
  EXPECT_FALSE(wave_breaking_guard(bad, 10.0));
  const Field steep = Field::sample(g, [](double x) { return std::tanh(-20 * x); });
  EXPECT_FALSE(wave_breaking_guard(steep, 10.0));
}

TEST(SignCondition, Examples) {
  const PeriodicGrid g(256, 50.0);
  EXPECT_TRUE(sign_condition_m0(Field(g)));
  const Field c = Field::sample(g, [&](double x) { return std::cos(2 * kPi * x / g.length()); });
  EXPECT_FALSE(sign_condition_m0(c));
  const PeriodicGrid fine(2048, 100.0);
  EXPECT_TRUE(sign_condition_m0(mollified_peakon(1.0, 0.25, fine)));
}
