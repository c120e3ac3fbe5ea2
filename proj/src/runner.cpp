#include "runner.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace chvirial::cli {

std::string fmt17(double v) { return fmt::format("{:.17g}", v); }

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + tmp.string());
    os << content;
    if (!os) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace {

bool diagnostics_defined(double t) { return t >= 2.0 - 1e-12; }

int exit_code_for(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return kExitOk;
    case RunStatus::BlowUpDetected: return kExitBlowUp;
    case RunStatus::TailBudgetExceeded: return kExitTail;
  }
  return kExitConfig;
}

std::string series_csv(const Scenario& sc, const std::vector<double>& times,
                       const std::vector<Field>& snaps) {
  std::ostringstream os;
  os << "t,I1,E,M_bbm,E_bbm,E_dp";
  for (const auto& d : sc.diagnostics) os << ',' << d.label << "_value," << d.label << "_rhs";
  for (const auto& r : sc.regions) os << ',' << r.label;
  os << '\n';
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const Field& u = snaps[i];
    const auto c = conserved(sc.sim.model, u);
    os << fmt17(t) << ',' << fmt17(c.I1) << ',' << fmt17(c.E) << ',' << fmt17(c.M_bbm) << ','
       << fmt17(c.E_bbm) << ',' << fmt17(c.E_dp);
    for (const auto& d : sc.diagnostics) {
      if (diagnostics_defined(t) && i % static_cast<std::size_t>(d.cadence) == 0) {
        os << ',' << fmt17(virial_value(d.kind, u, t, d.weight, d.theta)) << ','
           << fmt17(virial_rhs(d.kind, u, t, d.weight, d.theta));
      } else {
        os << ",,";
      }
    }
    for (const auto& r : sc.regions) {
      os << ',';
      if (diagnostics_defined(t)) {
        os << fmt17(region_norm(u, t, r.region, r.norm, r.C0, r.b, r.a_ext, r.b_ext));
      }
    }
    os << '\n';
  }
  return os.str();
}

/// Index one past the last snapshot on the uniform time lattice.
std::size_t uniform_end(const std::vector<double>& times) {
  if (times.size() < 2) return times.size();
  const double h = times[1] - times[0];
  std::size_t end = 2;
  while (end < times.size() && std::abs(times[end] - times[end - 1] - h) <= 1e-9 * h) ++end;
  return end;
}

}  // namespace

double fd_derivative(const std::vector<double>& v, std::size_t first, std::size_t i, double h) {
  const std::size_t last = v.size() - 1;
  if (i >= first + 2 && i + 2 <= last) {
    return (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
  }
  if (i < first + 2 && i + 4 <= last) {
    return (-25.0 * v[i] + 48.0 * v[i + 1] - 36.0 * v[i + 2] + 16.0 * v[i + 3] - 3.0 * v[i + 4]) /
           (12.0 * h);
  }
  if (i >= first + 4) {
    return (25.0 * v[i] - 48.0 * v[i - 1] + 36.0 * v[i - 2] - 16.0 * v[i - 3] + 3.0 * v[i - 4]) /
           (12.0 * h);
  }
  throw Error("fd_derivative: fewer than five samples");
}

std::vector<IdentityRow> check_identities(const Scenario& sc, const Archive& a) {
  std::vector<IdentityRow> rows;
  const std::size_t end = uniform_end(a.times);
  std::size_t first = 0;
  while (first < end && !diagnostics_defined(a.times[first])) ++first;
  if (end < first + 5) {
    throw Error("verify-identities: need at least five equally spaced snapshots with t >= 2");
  }
  const double h = a.times[1] - a.times[0];
  const auto& tol = sc.tolerance;
  for (const auto& d : sc.diagnostics) {
    std::vector<double> v(end, 0.0);
    for (std::size_t i = first; i < end; ++i) {
      v[i] = virial_value(d.kind, a.snapshots[i], a.times[i], d.weight, d.theta);
    }
    for (std::size_t i = first; i < end; ++i) {
      IdentityRow r;
      r.t = a.times[i];
      r.kind = std::string(to_string(d.kind.tag));
      r.label = d.label;
      r.lhs_fd = fd_derivative(v, first, i, h);
      r.rhs = virial_rhs(d.kind, a.snapshots[i], a.times[i], d.weight, d.theta);
      r.abs_err = std::abs(r.lhs_fd - r.rhs);
      const double scale = std::max(std::abs(r.lhs_fd), std::abs(r.rhs));
      r.rel_err = scale > 0.0 ? r.abs_err / scale : 0.0;
      const bool small = std::abs(r.lhs_fd) < tol.small && std::abs(r.rhs) < tol.small;
      r.pass = r.rel_err <= tol.rel || (small && r.abs_err <= tol.abs);
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

DecayFit fit_loglog(const std::string& label, const std::vector<double>& t,
                    const std::vector<double>& v, double t0, double t1) {
  DecayFit f;
  f.label = label;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t0 - 1e-12 || t[i] > t1 + 1e-12 || !(v[i] > 0.0)) continue;
    const double x = std::log(t[i]), y = std::log(v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++f.points;
  }
  const double n = static_cast<double>(f.points);
  const double den = n * sxx - sx * sx;
  f.slope = f.points >= 2 && den > 0.0 ? (n * sxy - sx * sy) / den : std::nan("");
  return f;
}

int cmd_simulate(const std::filesystem::path& cfg, std::ostream& log) {
  try {
    const Scenario sc = load_scenario(cfg);
    if (sc.mode != ScenarioMode::Simulate) {
      log << sc.name << ": shock_peakon scenarios are evaluation-only; use decay-report\n";
      return kExitConfig;
    }
    const Field u0 = build_initial(sc);
    const Trajectory traj = run(sc.sim, u0);
    std::filesystem::create_directories(sc.output_dir);

    nlohmann::json extra;
    extra["name"] = sc.name;
    if (sc.initial_file) {
      extra["initial"] = {{"file", sc.initial_file->string()}};
    } else {
      for (const auto& c : sc.initial) {
        extra["initial"][c.label] = {{"kind", std::string(to_string(c.spec.kind))}, {"c", c.spec.c},
                                     {"k", c.spec.k}, {"p", c.spec.p}, {"A", c.spec.A},
                                     {"sigma", c.spec.sigma}, {"x0", c.spec.x0}};
      }
    }
    write_archive(sc.archive_path(), sc.sim, traj, extra);
    write_atomic(sc.output_dir / "series.csv", series_csv(sc, traj.times, traj.snapshots));

    log << sc.name << ": " << to_string(traj.status) << " with " << traj.times.size()
        << " snapshots, t_final = " << fmt17(traj.times.back());
    if (traj.status != RunStatus::Completed) {
      log << " (failed at t = " << fmt17(traj.failure_time) << ": " << traj.message << ")";
    }
    log << "\n  wrote " << sc.archive_path().string() << " and series.csv\n";
    return exit_code_for(traj.status);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

int cmd_verify_identities(const std::filesystem::path& cfg, std::ostream& log) {
  std::vector<IdentityRow> rows;
  Scenario sc;
  try {
    sc = load_scenario(cfg);
    if (sc.mode != ScenarioMode::Simulate) {
      log << sc.name << ": no trajectory in shock_peakon mode\n";
      return kExitConfig;
    }
    const Archive a = read_archive(sc.archive_path());
    if (!(a.config.grid == sc.sim.grid) || a.config.model.family != sc.sim.model.family) {
      log << "error: archive " << sc.archive_path().string()
          << " was produced by a different grid or model than the scenario\n";
      return kExitConfig;
    }
    rows = check_identities(sc, a);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::ostringstream os;
  os << "t,kind,lhs_fd,rhs_analytic,abs_err,rel_err,label,pass\n";
  for (const auto& r : rows) {
    os << fmt17(r.t) << ',' << r.kind << ',' << fmt17(r.lhs_fd) << ',' << fmt17(r.rhs) << ','
       << fmt17(r.abs_err) << ',' << fmt17(r.rel_err) << ',' << r.label << ','
       << (r.pass ? "pass" : "FAIL") << '\n';
  }
  write_atomic(sc.output_dir / "identities.csv", os.str());

  bool all = true;
  for (const auto& d : sc.diagnostics) {
    std::size_t n = 0, failed = 0;
    double worst = 0.0;
    std::vector<double> fail_times;
    for (const auto& r : rows) {
      if (r.label != d.label) continue;
      ++n;
      worst = std::max(worst, r.rel_err);
      if (!r.pass) {
        ++failed;
        fail_times.push_back(r.t);
      }
    }
    all = all && failed == 0;
    log << fmt::format("{:<20} {:<18} rows {:>5}  max rel err {:.3e}  {}", d.label,
                       to_string(d.kind.tag), n, worst, failed ? "FAIL" : "pass");
    if (failed) {
      log << fmt::format("  ({} failing, t in [{}, {}])", failed, fmt17(fail_times.front()),
                         fmt17(fail_times.back()));
    }
    log << '\n';
  }
  log << (all ? "all identities pass\n" : "identity check FAILED\n");
  return all ? kExitOk : kExitIdentity;
}

namespace {

struct DecaySeries {
  std::vector<std::string> labels;
  std::map<std::string, std::vector<double>> values;
  std::vector<double> times;
};

std::string decay_csv(const DecaySeries& s) {
  std::ostringstream os;
  os << "t,region,value\n";
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    for (const auto& l : s.labels) {
      os << fmt17(s.times[i]) << ',' << l << ',' << fmt17(s.values.at(l)[i]) << '\n';
    }
  }
  return os.str();
}

std::string plot_script(const DecaySeries& s) {
  std::ostringstream os;
  os << "set datafile separator ','\n"
        "set logscale xy\n"
        "set xlabel 't'\n"
        "set ylabel 'value'\n"
        "set key outside right\n"
        "set terminal pngcairo size 1000,700\n"
        "set output 'decay.png'\n"
        "plot \\\n";
  for (std::size_t k = 0; k < s.labels.size(); ++k) {
    const auto& l = s.labels[k];
    os << "  'decay.csv' every ::1 using 1:(strcol(2) eq '" << l << "' ? $3 : NaN) with lines title '"
       << l << "'" << (k + 1 < s.labels.size() ? ", \\\n" : "\n");
  }
  return os.str();
}

}  // namespace

int cmd_decay_report(const std::filesystem::path& cfg, std::ostream& log) {
  Scenario sc;
  DecaySeries s;
  try {
    sc = load_scenario(cfg);
    if (sc.mode == ScenarioMode::ShockPeakon) {
      const auto& sh = sc.shock;
      const std::string label = "shock_peakon_local_l2";
      s.labels = {label};
      for (int i = 0; i < sh.samples; ++i) {
        const double t = sh.t_min * std::pow(sh.t_max / sh.t_min, static_cast<double>(i) / (sh.samples - 1));
        s.times.push_back(t);
        s.values[label].push_back(shock_peakon_local_l2(t, sh.k, sh.b));
      }
    } else {
      const Archive a = read_archive(sc.archive_path());
      if (a.times.size() < 16) {
        log << "error: decay report needs at least 16 snapshots, archive has " << a.times.size() << '\n';
        return kExitConfig;
      }
      for (const auto& r : sc.regions) {
        s.labels.push_back(r.label);
        if (r.region != Region::I_ext) s.labels.push_back(r.label + "_integral");
      }
      s.labels.push_back("L1_abs");
      std::map<std::string, double> acc;
      double t_prev = 0.0;
      std::map<std::string, double> dens_prev;
      for (std::size_t i = 0; i < a.times.size(); ++i) {
        const double t = a.times[i];
        if (!diagnostics_defined(t)) continue;
        const Field& u = a.snapshots[i];
        s.times.push_back(t);
        for (const auto& r : sc.regions) {
          s.values[r.label].push_back(region_norm(u, t, r.region, r.norm, r.C0, r.b, r.a_ext, r.b_ext));
          if (r.region == Region::I_ext) continue;
          const auto center = r.region == Region::J_b ? WeightCenter::MovingLine : WeightCenter::Origin;
          const double dens = local_sech2_density(u, t, r.b, center, r.norm);
          const auto key = r.label + "_integral";
          if (dens_prev.count(key)) acc[key] += 0.5 * (t - t_prev) * (dens + dens_prev[key]);
          dens_prev[key] = dens;
          s.values[key].push_back(acc[key]);
        }
        s.values["L1_abs"].push_back(quadrature(u.map([](double v) { return std::abs(v); })));
        t_prev = t;
      }
      if (s.times.size() < 16) {
        log << "error: decay report needs at least 16 snapshots with t >= 2\n";
        return kExitConfig;
      }
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  const double t_end = s.times.back();
  std::ostringstream fit;
  fit << "label,slope,points,t_first,value_first,t_last,value_last\n";
  log << sc.name << ": log-log slopes over [" << fmt17(t_end / 4) << ", " << fmt17(t_end) << "]\n";
  for (const auto& l : s.labels) {
    const auto& v = s.values.at(l);
    const auto f = fit_loglog(l, s.times, v, t_end / 4.0, t_end);
    fit << l << ',' << fmt17(f.slope) << ',' << f.points << ',' << fmt17(s.times.front()) << ','
        << fmt17(v.front()) << ',' << fmt17(s.times.back()) << ',' << fmt17(v.back()) << '\n';
    log << fmt::format("  {:<28} slope {:+.4f}  ({} points)\n", l, f.slope, f.points);
  }
  try {
    std::filesystem::create_directories(sc.output_dir);
    write_atomic(sc.output_dir / "decay.csv", decay_csv(s));
    write_atomic(sc.output_dir / "decay_fit.csv", fit.str());
    write_atomic(sc.output_dir / "decay.gp", plot_script(s));
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

int cmd_batch(const std::filesystem::path& list, unsigned workers, std::ostream& log) {
  std::ifstream in(list);
  if (!in) {
    log << "error: cannot open batch list " << list.string() << '\n';
    return kExitConfig;
  }
  std::vector<std::filesystem::path> files;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    std::filesystem::path p = line.substr(b, e - b + 1);
    files.push_back(p.is_absolute() ? p : list.parent_path() / p);
  }

  std::map<std::string, std::filesystem::path> by_name;
  for (const auto& f : files) {
    try {
      const auto sc = load_scenario(f);
      if (!by_name.emplace(sc.name, f).second) {
        log << "error: scenario name '" << sc.name << "' appears twice in " << list.string() << '\n';
        return kExitConfig;
      }
    } catch (const std::exception& e) {
      log << "error: " << e.what() << '\n';
      return kExitConfig;
    }
  }

  std::vector<std::pair<std::string, std::filesystem::path>> jobs(by_name.begin(), by_name.end());
  std::vector<int> codes(jobs.size(), 0);
  std::vector<std::string> logs(jobs.size());
  std::atomic<std::size_t> next{0};
  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < n; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
          std::ostringstream os;
          codes[i] = cmd_simulate(jobs[i].second, os);
          logs[i] = os.str();
        }
      });
    }
  }
  int worst = kExitOk;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    log << "[" << jobs[i].first << "] exit " << codes[i] << '\n' << logs[i];
    worst = std::max(worst, codes[i]);
  }
  return worst;
}

int cmd_exact_eval(const std::vector<std::string>& args, std::ostream& out, std::ostream& log) {
  try {
    ExactSpec spec;
    double t = 0.0, len = 100.0;
    std::size_t n = 1024;
    std::optional<double> x;
    bool have_kind = false;
    for (const auto& a : args) {
      const auto eq = a.find('=');
      if (eq == std::string::npos) throw Error("expected key=value, got '" + a + "'");
      const auto key = a.substr(0, eq);
      const auto val = a.substr(eq + 1);
      const auto number = [&] {
        std::size_t used = 0;
        double d = 0.0;
        try {
          d = std::stod(val, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != val.size() || val.empty()) throw Error(key + ": expected a number, got '" + val + "'");
        return d;
      };
      if (key == "kind") {
        spec.kind = exact_kind_from_string(val);
        have_kind = true;
      } else if (key == "c") spec.c = number();
      else if (key == "k") spec.k = number();
      else if (key == "p") spec.p = static_cast<int>(number());
      else if (key == "A") spec.A = number();
      else if (key == "sigma") spec.sigma = number();
      else if (key == "x0") spec.x0 = number();
      else if (key == "t") t = number();
      else if (key == "x") x = number();
      else if (key == "L") len = number();
      else if (key == "N") n = static_cast<std::size_t>(number());
      else throw Error("unknown key '" + key + "'");
    }
    if (!have_kind) throw Error("missing kind=...");
    if (x) {
      out << fmt17(exact_value(spec, t, *x, len)) << '\n';
      return kExitOk;
    }
    const PeriodicGrid grid(n, len);
    const Field u = evaluate(spec, t, grid);
    out << "x,u\n";
    for (std::size_t j = 0; j < n; ++j) out << fmt17(grid.node(j)) << ',' << fmt17(u[j]) << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace chvirial::cli
