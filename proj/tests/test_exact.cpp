#include "support.hpp"

#include <gtest/gtest.h>

using namespace chvirial;
using namespace testing_support;

namespace {

ExactSpec spec(ExactKind k) {
  ExactSpec s;
  s.kind = k;
  return s;
}

}  // namespace

TEST(ExactSpec, Validation) {
  ExactSpec s = spec(ExactKind::Peakon);
  s.c = 0.0;
  EXPECT_THROW(s.validate(), Error);
  s = spec(ExactKind::ShockPeakon);
  s.k = 0.0;
  EXPECT_THROW(s.validate(), Error);
  s = spec(ExactKind::BBMSolitary);
  s.c = 1.0;
  EXPECT_THROW(s.validate(), Error);
  s = spec(ExactKind::BBMNegative);
  s.p = 3;
  EXPECT_THROW(s.validate(), Error);
  s = spec(ExactKind::Gaussian);
  s.sigma = 0.0;
  EXPECT_THROW(s.validate(), Error);
  EXPECT_THROW(exact_kind_from_string("Soliton"), Error);
  EXPECT_TRUE(spec(ExactKind::ShockPeakon).evaluation_only());
  EXPECT_FALSE(spec(ExactKind::Peakon).evaluation_only());
}

TEST(Evaluate, PointExamples) {
  EXPECT_DOUBLE_EQ(exact_value(spec(ExactKind::Peakon), 0.0, 0.0, 100.0), 1.0);
  ExactSpec bbm = spec(ExactKind::BBMSolitary);
  bbm.c = 2.0;
  EXPECT_NEAR(exact_value(bbm, 0.0, 0.0, 100.0), 1.5, 1e-15);
  EXPECT_NEAR(exact_value(spec(ExactKind::ShockPeakon), 0.0, 1.0, 100.0), 0.36787944117144233, 1e-15);
  ExactSpec sp = spec(ExactKind::ShockPeakon);
  sp.k = 1.0;
  EXPECT_THROW(exact_value(sp, -1.0, 0.0, 100.0), Error);
}

TEST(Evaluate, TravelingFormsWrapOnTorus) {
  const PeriodicGrid g(256, 50.0);
  ExactSpec p = spec(ExactKind::Peakon);
  p.c = 2.0;
  const Field at0 = evaluate(p, 0.0, g);
  const Field later = evaluate(p, 12.5, g);  // 2 * 12.5 = L/2: shift by half the torus
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(later[j], at0[(j + 128) % 256], 1e-14);

  ExactSpec neg = spec(ExactKind::BBMNegative);
  neg.c = 1.0;
  EXPECT_NEAR(exact_value(neg, 0.0, 0.0, 50.0), -3.0, 1e-14);
  EXPECT_NEAR(exact_value(neg, 5.0, -5.0, 50.0), -3.0, 1e-14);
}

TEST(MollifiedPeakon, Examples) {
  const PeriodicGrid g(2048, 100.0);
  const Field u = mollified_peakon(1.0, 0.25, g);
  EXPECT_TRUE(sign_condition_m0(u));
  EXPECT_NEAR(quadrature(u), 2.0, 1e-8);
  EXPECT_EQ(mollified_peakon(0.0, 0.5, g).max_abs(), 0.0);
  EXPECT_THROW(mollified_peakon(1.0, 0.0, g), Error);
}

TEST(MollifiedPeakon, ConvergesToPeakon) {
  const PeriodicGrid g(8192, 100.0);
  const Field peakon = Field::sample(g, [](double x) { return std::exp(-std::abs(x)); });
  double prev = 1e300;
  for (double sigma : {1.0, 0.5, 0.25, 0.125}) {
    const Field d = mollified_peakon(1.0, sigma, g) - peakon;
    const double err = std::sqrt(quadrature(d * d));
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 0.03);
}

TEST(ShockPeakon, LocalL2Examples) {
  EXPECT_NEAR(shock_peakon_local_l2(4.0, 1.0, 0.5), (1 - std::exp(-4.0 / std::log(4.0))) / 25.0, 1e-15);
  EXPECT_NEAR(shock_peakon_local_l2(4.0, 1.0, 0.5), 0.0377, 1e-4);
  EXPECT_LT(shock_peakon_local_l2(4.0, 1e12, 0.5), 1e-23);
  EXPECT_THROW(shock_peakon_local_l2(1.5, 1.0, 0.5), Error);
  const double t = 1e5;
  EXPECT_NEAR(shock_peakon_local_l2(t, 1.0, 0.5) / shock_peakon_local_l2(4 * t, 1.0, 0.5), 16.0, 1e-3);
  for (double s : {10.0, 100.0, 1e4}) {
    const double scaled = shock_peakon_local_l2(s, 3.0, 0.5) * (s + 3.0) * (s + 3.0);
    EXPECT_LE(scaled, 1.0);
    EXPECT_GT(scaled, 0.9);
  }
}

TEST(ShockPeakon, MatchesGridQuadrature) {
  const double t = 16.0, k = 1.0, b = 0.5;
  const PeriodicGrid g(1 << 16, 60.0);
  ExactSpec s = spec(ExactKind::ShockPeakon);
  s.k = k;
  const Field u = evaluate(s, t, g);
  const double lam = region_scale(t, b);
  double acc = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (std::abs(g.node(j)) <= lam) acc += u[j] * u[j] * g.spacing();
  }
  EXPECT_NEAR(acc, shock_peakon_local_l2(t, k, b), 2e-3 * acc);
}

TEST(BbmSolitary, TravelingWaveResidual) {
  const PeriodicGrid g(4096, 100.0);
  for (int p : {2, 3, 4}) {
    ExactSpec s = spec(ExactKind::BBMSolitary);
    s.c = 2.0;
    s.p = p;
    ModelSpec m;
    m.family = Family::GBBM;
    m.p = p;
    const Field u = evaluate(s, 0.0, g);
    EXPECT_LE((rhs(m, u) + 2.0 * derivative(u, 1)).max_abs(), 1e-6) << "p=" << p;
  }
  ExactSpec n = spec(ExactKind::BBMNegative);
  n.c = 1.5;
  ModelSpec m;
  m.family = Family::GBBM;
  const Field u = evaluate(n, 0.0, g);
  EXPECT_LE((rhs(m, u) - 1.5 * derivative(u, 1)).max_abs(), 1e-6);
}
