#pragma once

// Scenario files: INI-style sections with JSON scalar values.
//
//   [scenario]          name, mode (simulate | shock_peakon), output_dir
//   [model]             family, b, gamma, p
//   [grid]              N, L
//   [time]              dt, T, snapshot_stride, guard_threshold, tail_budget, decay_experiment
//   [initial.<label>]   kind, c, k, p, A, sigma, x0   (components are summed)
//   [initial]           file                          (text values or a .snap archive)
//   [diagnostic.<label>] kind, shape, scale, b, center, C0, theta_a, theta_iota, k, cadence
//   [region.<label>]    region, norm, C0, b, a_ext, b_ext
//   [identities]        rel_tol, abs_tol, small
//   [shock]             k, b, t_min, t_max, samples

#include <chvirial/chvirial.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace chvirial::cli {

/// Malformed or inconsistent scenario; the message carries file and line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct InitialComponent {
  std::string label;
  ExactSpec spec;
};

struct DiagnosticSpec {
  std::string label;
  VirialKind kind;
  WeightSpec weight;
  std::optional<ThetaSpec> theta;
  int cadence = 1;
};

struct RegionSpec {
  std::string label;
  Region region = Region::I_b;
  NormKind norm = NormKind::H1;
  double C0 = 1.0;
  double b = 0.5;
  double a_ext = 0.0;
  double b_ext = 0.0;
};

struct IdentityTolerance {
  double rel = 1e-3;
  double abs = 1e-8;
  double small = 1e-5;
};

struct ShockSpec {
  double k = 1.0;
  double b = 0.5;
  double t_min = 10.0;
  double t_max = 1e4;
  int samples = 64;
};

enum class ScenarioMode { Simulate, ShockPeakon };

struct Scenario {
  std::string name;
  ScenarioMode mode = ScenarioMode::Simulate;
  SimConfig sim;
  std::vector<InitialComponent> initial;
  std::optional<std::filesystem::path> initial_file;
  std::vector<DiagnosticSpec> diagnostics;
  std::vector<RegionSpec> regions;
  IdentityTolerance tolerance;
  ShockSpec shock;
  std::filesystem::path output_dir;

  std::filesystem::path archive_path() const { return output_dir / "trajectory.snap"; }
};

/// Parses scenario text; `origin` names the source in diagnostics and
/// `base_dir` anchors relative paths.
Scenario parse_scenario(const std::string& text, const std::string& origin,
                        const std::filesystem::path& base_dir);

/// Reads and parses a scenario file. CHVIRIAL_OUTPUT_ROOT, when set,
/// replaces the output directory by $CHVIRIAL_OUTPUT_ROOT/<name>.
Scenario load_scenario(const std::filesystem::path& file);

/// Initial data on the scenario grid: the sum of the components, or the file.
Field build_initial(const Scenario& sc);

}  // namespace chvirial::cli
