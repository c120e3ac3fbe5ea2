#pragma once

// Experiment commands behind the CLI. Each returns a process exit code:
//   0 success, 1 configuration or archive error, 2 blow-up detected,
//   3 tail budget exceeded, 4 identity check failed.

#include "config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace chvirial::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitBlowUp = 2;
inline constexpr int kExitTail = 3;
inline constexpr int kExitIdentity = 4;

struct IdentityRow {
  double t = 0.0;
  std::string kind;
  std::string label;
  double lhs_fd = 0.0;
  double rhs = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  bool pass = true;
};

/// Compares a 4th-order finite-difference derivative of each diagnostic's
/// value series with its analytic right-hand side, at every snapshot with
/// t >= 2 whose stencil stays in t >= 2.
std::vector<IdentityRow> check_identities(const Scenario& sc, const Archive& a);

/// 4th-order derivative of uniformly sampled `v` at index i (central inside,
/// one-sided at the ends). `first` is the first usable index.
double fd_derivative(const std::vector<double>& v, std::size_t first, std::size_t i, double h);

struct DecayFit {
  std::string label;
  double slope = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of log v against log t for the samples with t in [t0, t1] and v > 0.
DecayFit fit_loglog(const std::string& label, const std::vector<double>& t,
                    const std::vector<double>& v, double t0, double t1);

/// Formats with 17 significant digits.
std::string fmt17(double v);

/// Writes `content` to `path` through a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

int cmd_simulate(const std::filesystem::path& cfg, std::ostream& log);
int cmd_verify_identities(const std::filesystem::path& cfg, std::ostream& log);
int cmd_decay_report(const std::filesystem::path& cfg, std::ostream& log);
/// Runs `simulate` for each scenario listed in `list` (one path per line)
/// on `workers` threads; returns the largest exit code.
int cmd_batch(const std::filesystem::path& list, unsigned workers, std::ostream& log);
/// Evaluates an exact solution from key=value arguments.
int cmd_exact_eval(const std::vector<std::string>& args, std::ostream& out, std::ostream& log);

}  // namespace chvirial::cli
