#pragma once

// Fixed-step RK4 time integration with blow-up and wraparound guards.

#include <chvirial/grid.hpp>
#include <chvirial/models.hpp>

#include <cmath>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace chvirial {

/// Raised when an integrator stage produces NaN/Inf.
class BlowUpError : public Error {
 public:
  using Error::Error;
};

enum class RunStatus { Completed, BlowUpDetected, TailBudgetExceeded };

inline std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "Completed";
    case RunStatus::BlowUpDetected: return "BlowUpDetected";
    case RunStatus::TailBudgetExceeded: return "TailBudgetExceeded";
  }
  return "?";
}

struct SimConfig {
  ModelSpec model;
  PeriodicGrid grid{256, 100.0};
  double dt = 1e-3;
  double T = 1.0;
  int snapshot_stride = 1;
  /// Bound on max|u_x|; zero selects default_guard_threshold(u0).
  double guard_threshold = 0.0;
  /// Allowed ratio of the tail energy over |x| > 0.4L to the initial energy.
  double tail_budget = 1e-6;
  /// CH decay experiments require m0 >= 0.
  bool decay_experiment = false;

  void validate() const {
    model.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("SimConfig: dt must be positive");
    if (!(T > 0.0) || !std::isfinite(T)) throw Error("SimConfig: T must be positive");
    if (snapshot_stride < 1) throw Error("SimConfig: snapshot_stride must be >= 1");
    if (dt > 0.5 * grid.spacing() * (1.0 + 1e-12)) {
      throw Error("SimConfig: dt = " + std::to_string(dt) + " exceeds 0.5*L/N = " +
                  std::to_string(0.5 * grid.spacing()));
    }
    if (guard_threshold < 0.0) throw Error("SimConfig: guard_threshold must be >= 0");
    if (!(tail_budget > 0.0)) throw Error("SimConfig: tail_budget must be positive");
  }

  /// Number of steps; the last step lands on or just past T.
  std::size_t steps() const {
    const double n = T / dt;
    const double r = std::round(n);
    return static_cast<std::size_t>(std::abs(n - r) < 1e-9 * std::max(1.0, n) ? r : std::ceil(n));
  }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Field> snapshots;
  RunStatus status = RunStatus::Completed;
  /// Time of the failed step when status is not Completed.
  double failure_time = 0.0;
  std::string message;
};

/// Integral of u^2 + u_x^2 over |x| > 0.4L.
inline double tail_energy(const Field& u) {
  const Field ux = derivative(u, 1);
  const auto& g = u.grid();
  const double edge = 0.4 * g.length();
  double s = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (std::abs(g.node(j)) > edge) s += u[j] * u[j] + ux[j] * ux[j];
  }
  return s * g.spacing();
}

inline double h1_energy(const Field& u) {
  const Field ux = derivative(u, 1);
  return quadrature(u * u + ux * ux);
}

namespace detail {

inline Field checked_stage(const ModelSpec& m, const Field& u, const char* stage) {
  if (auto bad = u.first_non_finite()) {
    throw BlowUpError(std::string("step_rk4: non-finite ") + stage + " at index " +
                      std::to_string(*bad));
  }
  Field k = rhs(m, u);
  if (auto bad = k.first_non_finite()) {
    throw BlowUpError(std::string("step_rk4: non-finite slope in ") + stage +
                      " at index " + std::to_string(*bad));
  }
  return k;
}

}  // namespace detail

/// One classical RK4 step; the result is dealiased.
inline Field step_rk4(const ModelSpec& m, const Field& u, double dt) {
  require_finite(u, "step_rk4");
  const Field k1 = detail::checked_stage(m, u, "stage 1");
  const Field k2 = detail::checked_stage(m, u + (0.5 * dt) * k1, "stage 2");
  const Field k3 = detail::checked_stage(m, u + (0.5 * dt) * k2, "stage 3");
  const Field k4 = detail::checked_stage(m, u + dt * k3, "stage 4");
  Field next = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (auto bad = next.first_non_finite()) {
    throw BlowUpError("step_rk4: non-finite result at index " + std::to_string(*bad));
  }
  return dealias(next);
}

/// Called after each stored snapshot with (index, t, u).
using SnapshotObserver = std::function<void(std::size_t, double, const Field&)>;

/// Integrates u0 to T. When `keep_snapshots` is false only the observer sees
/// the fields, which keeps memory flat for long runs.
inline Trajectory run(const SimConfig& cfg, const Field& u0,
                      const SnapshotObserver& observer = {}, bool keep_snapshots = true) {
  cfg.validate();
  require_finite(u0, "run");
  if (!(u0.grid() == cfg.grid)) throw Error("run: initial data lives on a different grid");
  if (cfg.decay_experiment && cfg.model.family == Family::CH && !sign_condition_m0(u0)) {
    throw Error("run: decay experiment requires m0 = (1 - d^2)u0 >= 0");
  }

  Trajectory traj;
  Field u = dealias(u0);
  const double threshold =
      cfg.guard_threshold > 0.0 ? cfg.guard_threshold : default_guard_threshold(u);
  const double e0 = h1_energy(u);

  auto store = [&](double t) {
    if (observer) observer(traj.times.size(), t, u);
    traj.times.push_back(t);
    if (keep_snapshots) traj.snapshots.push_back(u);
  };
  store(0.0);

  const std::size_t n = cfg.steps();
  const auto stride = static_cast<std::size_t>(cfg.snapshot_stride);
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) * cfg.dt;
    try {
      u = step_rk4(cfg.model, u, cfg.dt);
    } catch (const BlowUpError& e) {
      traj.status = RunStatus::BlowUpDetected;
      traj.failure_time = t;
      traj.message = e.what();
      return traj;
    }
    if (!wave_breaking_guard(u, threshold)) {
      traj.status = RunStatus::BlowUpDetected;
      traj.failure_time = t;
      traj.message = "max|u_x| exceeded " + std::to_string(threshold);
      return traj;
    }
    if (i % stride == 0 || i == n) {
      const double tail = tail_energy(u);
      if (tail > cfg.tail_budget * e0) {
        traj.status = RunStatus::TailBudgetExceeded;
        traj.failure_time = t;
        traj.message = "tail energy " + std::to_string(tail) + " exceeds budget";
        return traj;
      }
      store(t);
    }
  }
  return traj;
}

}  // namespace chvirial
