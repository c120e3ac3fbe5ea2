#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace chvirial;
using namespace testing_support;

namespace {

SimConfig config(Family f, PeriodicGrid g, double dt, double T) {
  SimConfig c;
  c.model.family = f;
  c.grid = g;
  c.dt = dt;
  c.T = T;
  return c;
}

double l2_error(const Field& a, const Field& b) {
  const Field d = a - b;
  return std::sqrt(quadrature(d * d));
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "chvirial_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(SimConfig, Validation) {
  SimConfig c = config(Family::CH, PeriodicGrid(256, 100.0), 1e-3, 1.0);
  EXPECT_NO_THROW(c.validate());
  c.dt = 0.3;  // 0.5 * L/N = 0.195
  EXPECT_THROW(c.validate(), Error);
  c.dt = 1e-3;
  c.T = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c.T = 1.0;
  c.snapshot_stride = 0;
  EXPECT_THROW(c.validate(), Error);
  c.snapshot_stride = 1;
  EXPECT_EQ(c.steps(), 1000u);
  c.T = 1.0005;
  EXPECT_EQ(c.steps(), 1001u);
}

TEST(StepRk4, ZeroIsFixedPoint) {
  const PeriodicGrid g(64, 10.0);
  ModelSpec m;
  EXPECT_EQ(step_rk4(m, Field(g), 0.01).max_abs(), 0.0);
}

TEST(StepRk4, LinearDispersion) {
  const PeriodicGrid g(128, 40.0);
  ModelSpec m;
  m.family = Family::GBBM;
  const double eps = 1e-8, dt = 0.01;
  for (int mode : {1, 3, 7, 20}) {
    const double k = 2 * kPi * mode / g.length();
    const double w = k / (1 + k * k);
    const Field u = Field::sample(g, [&](double x) { return eps * std::cos(k * x); });
    const Field expect = Field::sample(g, [&](double x) { return eps * std::cos(k * x - w * dt); });
    EXPECT_LE(max_diff(step_rk4(m, u, dt), expect), 1e-12 * eps + eps * eps) << "mode " << mode;
  }
}

TEST(StepRk4, FourthOrderSelfConvergence) {
  const PeriodicGrid g(256, 40.0);
  ModelSpec m;
  const Field u0 = Field::sample(g, [](double x) { return std::exp(-x * x / 4); });
  auto solve = [&](double dt) {
    Field u = u0;
    const int n = static_cast<int>(std::lround(1.0 / dt));
    for (int i = 0; i < n; ++i) u = step_rk4(m, u, dt);
    return u;
  };
  const Field a = solve(0.04), b = solve(0.02), c = solve(0.01);
  const double ratio = max_diff(a, b) / max_diff(b, c);
  EXPECT_GT(ratio, 16.0 / 1.2);
  EXPECT_LT(ratio, 16.0 * 1.2);
}

TEST(StepRk4, NonFiniteStageSignalsBlowUp) {
  const PeriodicGrid g(64, 10.0);
  ModelSpec m;
  const Field huge = Field::constant(g, 1e200) + Field::sample(g, [](double x) { return 1e200 * std::sin(x); });
  EXPECT_THROW(step_rk4(m, huge, 0.01), BlowUpError);
}

TEST(Run, ZeroDataCompletes) {
  const SimConfig c = config(Family::CH, PeriodicGrid(64, 20.0), 0.01, 0.1);
  const Trajectory tr = run(c, Field(c.grid));
  EXPECT_EQ(tr.status, RunStatus::Completed);
  ASSERT_EQ(tr.times.size(), 11u);
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
    EXPECT_EQ(tr.snapshots[i].max_abs(), 0.0);
    if (i) {
      EXPECT_GT(tr.times[i], tr.times[i - 1]);
    }
  }
  EXPECT_NEAR(tr.times.back(), 0.1, 1e-12);
}

TEST(Run, StrideAndObserver) {
  SimConfig c = config(Family::DP, PeriodicGrid(64, 20.0), 0.01, 0.25);
  c.snapshot_stride = 10;
  std::vector<double> seen;
  const Trajectory tr = run(c, Field(c.grid), [&](std::size_t, double t, const Field&) { seen.push_back(t); }, false);
  EXPECT_TRUE(tr.snapshots.empty());
  ASSERT_EQ(seen.size(), 4u);  // 0, 0.1, 0.2 and the final step
  EXPECT_NEAR(seen.back(), 0.25, 1e-12);
  EXPECT_EQ(seen, tr.times);
}

TEST(Run, BbmSolitaryWaveTravels) {
  SimConfig c = config(Family::GBBM, PeriodicGrid(4096, 100.0), 0.01, 10.0);
  c.snapshot_stride = 1000;
  ExactSpec s;
  s.kind = ExactKind::BBMSolitary;
  s.c = 2.0;
  s.x0 = -20.0;
  const Trajectory tr = run(c, evaluate(s, 0.0, c.grid));
  ASSERT_EQ(tr.status, RunStatus::Completed) << tr.message;
  EXPECT_LE(l2_error(tr.snapshots.back(), evaluate(s, 10.0, c.grid)), 1e-4);
}

TEST(Run, SteepCollisionDetectsBreaking) {
  SimConfig c = config(Family::CH, PeriodicGrid(4096, 40.0), 1e-3, 0.5);
  c.guard_threshold = 50.0;
  c.tail_budget = 1.0;
  const Field u0 = Field::sample(c.grid, [](double x) { return -10.0 * x * std::exp(-x * x / 2); });
  const Trajectory tr = run(c, u0);
  EXPECT_EQ(tr.status, RunStatus::BlowUpDetected);
  EXPECT_LT(tr.failure_time, c.T);
  EXPECT_FALSE(tr.message.empty());
}

TEST(Run, TailBudgetExceeded) {
  SimConfig c = config(Family::CH, PeriodicGrid(256, 50.0), 0.01, 1.0);
  ExactSpec s;
  s.kind = ExactKind::Gaussian;
  s.x0 = 21.0;
  const Trajectory tr = run(c, evaluate(s, 0.0, c.grid));
  EXPECT_EQ(tr.status, RunStatus::TailBudgetExceeded);
}

TEST(Run, DecayExperimentRequiresSignCondition) {
  SimConfig c = config(Family::CH, PeriodicGrid(256, 50.0), 0.01, 0.1);
  c.decay_experiment = true;
  const Field bad = Field::sample(c.grid, [](double x) { return -std::exp(-x * x); });
  EXPECT_THROW(run(c, bad), Error);
  const PeriodicGrid other(128, 50.0);
  c.decay_experiment = false;
  EXPECT_THROW(run(c, Field(other)), Error);
}

TEST(Conservation, ChShortRun) {
  SimConfig c = config(Family::CH, PeriodicGrid(1024, 60.0), 5e-3, 5.0);
  c.snapshot_stride = 100;
  const Field u0 = mollified_peakon(1.0, 1.0, c.grid, -10.0);
  const Trajectory tr = run(c, u0);
  ASSERT_EQ(tr.status, RunStatus::Completed) << tr.message;
  const auto first = conserved(c.model, tr.snapshots.front());
  for (const auto& u : tr.snapshots) {
    const auto q = conserved(c.model, u);
    EXPECT_NEAR(q.I1, first.I1, 1e-10);
    EXPECT_NEAR(q.E, first.E, 1e-8 * first.E);
  }
}

TEST(Archive, RoundTrip) {
  SimConfig c = config(Family::GBBM, PeriodicGrid(64, 20.0), 0.01, 0.05);
  c.model.p = 3;
  ExactSpec s;
  s.kind = ExactKind::Gaussian;
  const Trajectory tr = run(c, evaluate(s, 0.0, c.grid));
  const auto path = scratch("roundtrip.snap");
  write_archive(path, c, tr, {{"name", "rt"}});
  const Archive a = read_archive(path);
  EXPECT_EQ(a.header.at("name"), "rt");
  EXPECT_EQ(a.config.model.p, 3);
  EXPECT_EQ(a.config.model.family, Family::GBBM);
  EXPECT_EQ(a.config.dt, c.dt);
  EXPECT_EQ(a.times, tr.times);
  ASSERT_EQ(a.snapshots.size(), tr.snapshots.size());
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
    EXPECT_EQ(max_diff(a.snapshots[i], tr.snapshots[i]), 0.0);
  }
}

TEST(Archive, CorruptionIsDiagnosed) {
  const SimConfig c = config(Family::CH, PeriodicGrid(32, 20.0), 0.01, 0.03);
  const Trajectory tr = run(c, Field(c.grid));
  const auto path = scratch("corrupt.snap");
  write_archive(path, c, tr);
  const auto size = std::filesystem::file_size(path);

  std::filesystem::resize_file(path, size - 8 * 40);
  try {
    read_archive(path);
    FAIL() << "truncation not detected";
  } catch (const ArchiveError& e) {
    EXPECT_NE(std::string(e.what()).find("first incomplete snapshot index 2"), std::string::npos) << e.what();
  }

  {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os << "NOTASNAPSHOTFILE";
  }
  EXPECT_THROW(read_archive(path), ArchiveError);

  write_archive(path, c, tr);
  {
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(17);
    f.put('#');
  }
  EXPECT_THROW(read_archive(path), ArchiveError);

  write_archive(path, c, tr);
  {
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(static_cast<std::streamoff>(size - 8));
    const double nan = std::nan("");
    f.write(reinterpret_cast<const char*>(&nan), 8);
  }
  try {
    read_archive(path);
    FAIL() << "non-finite value not detected";
  } catch (const ArchiveError& e) {
    EXPECT_NE(std::string(e.what()).find("snapshot 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(read_archive(scratch("missing.snap")), ArchiveError);
}
