#include "config.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace chvirial::cli {

namespace {

using nlohmann::json;

struct Entry {
  json value;
  int line = 0;
};

struct Section {
  std::string kind;   // "grid", "initial", "diagnostic", ...
  std::string label;  // part after the dot, may be empty
  int line = 0;
  std::map<std::string, Entry> entries;

  std::string title() const { return label.empty() ? kind : kind + "." + label; }
};

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

/// Drops a trailing '#' or ';' comment that is not inside a string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (!quoted && (c == '#' || c == ';')) return line.substr(0, i);
  }
  return line;
}

bool is_word(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '/' ||
          c == '-')) {
      return false;
    }
  }
  return std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_' || s[0] == '.' || s[0] == '/';
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"scenario", {"name", "mode", "output_dir"}},
      {"model", {"family", "b", "gamma", "p"}},
      {"grid", {"N", "L"}},
      {"time", {"dt", "T", "snapshot_stride", "guard_threshold", "tail_budget", "decay_experiment"}},
      {"initial", {"file"}},
      {"initial.*", {"kind", "c", "k", "p", "A", "sigma", "x0"}},
      {"diagnostic.*",
       {"kind", "shape", "scale", "b", "center", "C0", "theta_a", "theta_iota", "k", "cadence"}},
      {"region.*", {"region", "norm", "C0", "b", "a_ext", "b_ext"}},
      {"identities", {"rel_tol", "abs_tol", "small"}},
      {"shock", {"k", "b", "t_min", "t_max", "samples"}},
  };
  return keys;
}

class Reader {
 public:
  Reader(const Section& s, const std::string& origin) : s_(s), origin_(origin) {}

  [[noreturn]] void fail(int line, const std::string& what) const {
    throw ConfigError(origin_ + ":" + std::to_string(line) + ": [" + s_.title() + "] " + what);
  }
  [[noreturn]] void fail(const std::string& what) const { fail(s_.line, what); }

  bool has(const std::string& key) const { return s_.entries.count(key) != 0; }

  int line_of(const std::string& key) const {
    auto it = s_.entries.find(key);
    return it == s_.entries.end() ? s_.line : it->second.line;
  }

  double num(const std::string& key, double fallback) const {
    auto it = s_.entries.find(key);
    if (it == s_.entries.end()) return fallback;
    if (!it->second.value.is_number()) fail(it->second.line, key + ": expected a number");
    return it->second.value.get<double>();
  }

  double required_num(const std::string& key) const {
    if (!has(key)) fail("missing required key '" + key + "'");
    return num(key, 0.0);
  }

  long long integer(const std::string& key, long long fallback) const {
    auto it = s_.entries.find(key);
    if (it == s_.entries.end()) return fallback;
    const auto& v = it->second.value;
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
    }
    fail(it->second.line, key + ": expected an integer");
  }

  long long required_integer(const std::string& key) const {
    if (!has(key)) fail("missing required key '" + key + "'");
    return integer(key, 0);
  }

  std::string str(const std::string& key, const std::string& fallback) const {
    auto it = s_.entries.find(key);
    if (it == s_.entries.end()) return fallback;
    if (!it->second.value.is_string()) fail(it->second.line, key + ": expected a string");
    return it->second.value.get<std::string>();
  }

  std::string required_str(const std::string& key) const {
    if (!has(key)) fail("missing required key '" + key + "'");
    return str(key, "");
  }

  bool boolean(const std::string& key, bool fallback) const {
    auto it = s_.entries.find(key);
    if (it == s_.entries.end()) return fallback;
    if (!it->second.value.is_boolean()) fail(it->second.line, key + ": expected true or false");
    return it->second.value.get<bool>();
  }

  /// Runs `fn`, turning library errors into located config errors.
  template <typename F>
  auto guarded(const std::string& key, F&& fn) const -> decltype(fn()) {
    try {
      return fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(line_of(key), e.what());
    }
  }

 private:
  const Section& s_;
  const std::string& origin_;
};

std::vector<Section> split_sections(const std::string& text, const std::string& origin) {
  std::vector<Section> sections;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    const auto where = origin + ":" + std::to_string(line) + ": ";
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(where + "unterminated section header");
      const std::string title = trim(std::string_view(s).substr(1, s.size() - 2));
      Section sec;
      sec.line = line;
      const auto dot = title.find('.');
      sec.kind = title.substr(0, dot);
      if (dot != std::string::npos) sec.label = title.substr(dot + 1);
      const std::string schema = sec.label.empty() ? sec.kind : sec.kind + ".*";
      if (!allowed_keys().count(schema)) throw ConfigError(where + "unknown section [" + title + "]");
      if (!sec.label.empty()) {
        for (char c : sec.label) {
          if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
            throw ConfigError(where + "section label '" + sec.label + "' must be alphanumeric");
          }
        }
      }
      if (!seen.insert(title).second) throw ConfigError(where + "duplicate section [" + title + "]");
      sections.push_back(std::move(sec));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    if (sections.empty()) throw ConfigError(where + "key outside of any section");
    auto& sec = sections.back();
    const std::string key = trim(std::string_view(s).substr(0, eq));
    const std::string value = trim(std::string_view(s).substr(eq + 1));
    const std::string schema = sec.label.empty() ? sec.kind : sec.kind + ".*";
    if (!allowed_keys().at(schema).count(key)) {
      throw ConfigError(where + "unknown key '" + key + "' in [" + sec.title() + "]");
    }
    if (sec.entries.count(key)) throw ConfigError(where + "duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError(where + "empty value for '" + key + "'");
    Entry e;
    e.line = line;
    try {
      e.value = json::parse(value);
    } catch (const json::parse_error&) {
      if (!is_word(value)) throw ConfigError(where + "cannot parse value '" + value + "'");
      e.value = value;
    }
    if (e.value.is_structured() || e.value.is_null()) {
      throw ConfigError(where + "value of '" + key + "' must be a scalar");
    }
    sec.entries.emplace(key, std::move(e));
  }
  return sections;
}

Field read_initial_file(const std::filesystem::path& path, const PeriodicGrid& grid) {
  if (path.extension() == ".snap") {
    auto a = read_archive(path);
    if (!(a.config.grid == grid)) throw Error("initial archive " + path.string() + " uses another grid");
    if (a.snapshots.empty()) throw Error("initial archive " + path.string() + " holds no snapshots");
    return a.snapshots.back();
  }
  std::ifstream in(path);
  if (!in) throw Error("cannot open initial data file " + path.string());
  std::vector<double> v;
  double d;
  while (in >> d) v.push_back(d);
  if (!in.eof()) throw Error("initial data file " + path.string() + ": non-numeric entry after " +
                             std::to_string(v.size()) + " values");
  if (v.size() != grid.size()) {
    throw Error("initial data file " + path.string() + ": expected " + std::to_string(grid.size()) +
                " values, found " + std::to_string(v.size()));
  }
  return Field(grid, std::move(v));
}

void check_model_match(const Reader& r, const DiagnosticSpec& d, const ModelSpec& m) {
  const auto tag = d.kind.tag;
  const auto name = std::string(to_string(tag));
  const auto need = [&](bool ok, const std::string& what) {
    if (!ok) r.fail(r.line_of("kind"), name + ": " + what);
  };
  if (!d.kind.is_bbm()) {
    need(m.family == d.kind.family(),
         "needs a " + std::string(to_string(d.kind.family())) + " run, model is " +
             std::string(to_string(m.family)));
    return;
  }
  if (tag == VirialTag::XMoment_BBM_p2) {
    need(m.family == Family::GBBM && m.p == 2, "needs a GBBM run with p = 2");
    need(d.weight.center == WeightCenter::Origin, "is taken about the origin");
    return;
  }
  const int p = tag == VirialTag::XMoment_BBM_even ? 2 * d.kind.k : 2;
  need(m.is_bbm() && m.p == p, "needs a GBBM run with p = " + std::to_string(p));
  if (m.family == Family::GBBM_MovingFrame) {
    need(d.weight.center == WeightCenter::Origin, "moving-frame data needs center = Origin");
  } else {
    need(d.weight.center == WeightCenter::MovingLine, "lab-frame data needs center = MovingLine");
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin,
                        const std::filesystem::path& base_dir) {
  const auto sections = split_sections(text, origin);
  const auto find = [&](const std::string& kind) -> const Section* {
    for (const auto& s : sections) {
      if (s.kind == kind && s.label.empty()) return &s;
    }
    return nullptr;
  };
  const auto require = [&](const std::string& kind) -> const Section& {
    if (auto s = find(kind)) return *s;
    throw ConfigError(origin + ": missing section [" + kind + "]");
  };

  Scenario sc;
  {
    const auto& sec = require("scenario");
    Reader r(sec, origin);
    sc.name = r.required_str("name");
    if (!is_word(sc.name) || sc.name.find('/') != std::string::npos) {
      r.fail(r.line_of("name"), "name must be a plain identifier");
    }
    const auto mode = r.str("mode", "simulate");
    if (mode == "simulate") {
      sc.mode = ScenarioMode::Simulate;
    } else if (mode == "shock_peakon") {
      sc.mode = ScenarioMode::ShockPeakon;
    } else {
      r.fail(r.line_of("mode"), "mode must be simulate or shock_peakon");
    }
    const auto out = r.str("output_dir", "out/" + sc.name);
    sc.output_dir = std::filesystem::path(out).is_absolute() ? std::filesystem::path(out) : base_dir / out;
  }

  if (const auto* sec = find("identities")) {
    Reader r(*sec, origin);
    sc.tolerance.rel = r.num("rel_tol", sc.tolerance.rel);
    sc.tolerance.abs = r.num("abs_tol", sc.tolerance.abs);
    sc.tolerance.small = r.num("small", sc.tolerance.small);
    if (!(sc.tolerance.rel > 0 && sc.tolerance.abs > 0 && sc.tolerance.small > 0)) {
      r.fail("tolerances must be positive");
    }
  }

  if (const auto* sec = find("shock")) {
    Reader r(*sec, origin);
    auto& s = sc.shock;
    s.k = r.num("k", s.k);
    s.b = r.num("b", s.b);
    s.t_min = r.num("t_min", s.t_min);
    s.t_max = r.num("t_max", s.t_max);
    s.samples = static_cast<int>(r.integer("samples", s.samples));
    if (!(s.k > 0)) r.fail(r.line_of("k"), "k must be positive");
    if (!(s.b > 0 && s.b < 1)) r.fail(r.line_of("b"), "b must lie in (0,1)");
    if (!(s.t_min >= 2 && s.t_max > s.t_min)) r.fail("need 2 <= t_min < t_max");
    if (s.samples < 16) r.fail(r.line_of("samples"), "samples must be >= 16");
  }

  if (sc.mode == ScenarioMode::ShockPeakon) {
    for (const auto& s : sections) {
      if (s.kind != "scenario" && s.kind != "shock" && s.kind != "identities") {
        throw ConfigError(origin + ":" + std::to_string(s.line) + ": section [" + s.title() +
                          "] is not used in shock_peakon mode");
      }
    }
    return sc;
  }

  {
    const auto& sec = require("model");
    Reader r(sec, origin);
    auto& m = sc.sim.model;
    m.family = r.guarded("family", [&] { return family_from_string(r.required_str("family")); });
    m.b = r.num("b", m.b);
    m.gamma = r.num("gamma", m.gamma);
    m.p = static_cast<int>(r.integer("p", m.p));
    r.guarded("family", [&] { m.validate(); });
  }
  {
    const auto& sec = require("grid");
    Reader r(sec, origin);
    const auto n = r.required_integer("N");
    const double len = r.required_num("L");
    if (n <= 0) r.fail(r.line_of("N"), "N must be positive");
    sc.sim.grid = r.guarded("N", [&] { return PeriodicGrid(static_cast<std::size_t>(n), len); });
  }
  {
    const auto& sec = require("time");
    Reader r(sec, origin);
    auto& s = sc.sim;
    s.dt = r.required_num("dt");
    s.T = r.required_num("T");
    s.snapshot_stride = static_cast<int>(r.integer("snapshot_stride", 1));
    s.guard_threshold = r.num("guard_threshold", 0.0);
    s.tail_budget = r.num("tail_budget", s.tail_budget);
    s.decay_experiment = r.boolean("decay_experiment", false);
    r.guarded("dt", [&] { s.validate(); });
  }

  for (const auto& sec : sections) {
    Reader r(sec, origin);
    if (sec.kind == "initial" && sec.label.empty()) {
      const auto file = std::filesystem::path(r.required_str("file"));
      sc.initial_file = file.is_absolute() ? file : base_dir / file;
    } else if (sec.kind == "initial") {
      InitialComponent c;
      c.label = sec.label;
      auto& e = c.spec;
      e.kind = r.guarded("kind", [&] { return exact_kind_from_string(r.required_str("kind")); });
      e.c = r.num("c", e.c);
      e.k = r.num("k", e.k);
      e.p = static_cast<int>(r.integer("p", e.p));
      e.A = r.num("A", e.A);
      e.sigma = r.num("sigma", e.sigma);
      e.x0 = r.num("x0", e.x0);
      r.guarded("kind", [&] { e.validate(); });
      if (e.evaluation_only()) {
        r.fail(r.line_of("kind"), "ShockPeakon is not in H^1 and cannot be used as initial data");
      }
      sc.initial.push_back(std::move(c));
    } else if (sec.kind == "diagnostic") {
      DiagnosticSpec d;
      d.label = sec.label;
      d.kind.tag = r.guarded("kind", [&] { return virial_tag_from_string(r.required_str("kind")); });
      d.kind.k = static_cast<int>(r.integer("k", 1));
      d.weight = default_weight(d.kind.tag);
      if (r.has("shape")) {
        d.weight.shape = r.guarded("shape", [&] { return weight_shape_from_string(r.str("shape", "")); });
      }
      d.weight.scale = r.num("scale", d.weight.scale);
      d.weight.b = r.num("b", d.weight.b);
      d.weight.C0 = r.num("C0", d.weight.C0);
      if (r.has("center")) {
        d.weight.center =
            r.guarded("center", [&] { return weight_center_from_string(r.str("center", "")); });
      }
      if (d.kind.uses_theta()) {
        ThetaSpec th;
        th.a = r.num("theta_a", th.a);
        th.iota = r.num("theta_iota", th.iota);
        d.theta = th;
      } else if (r.has("theta_a") || r.has("theta_iota")) {
        r.fail(r.line_of(r.has("theta_a") ? "theta_a" : "theta_iota"),
               std::string(to_string(d.kind.tag)) + " takes no theta parameters");
      }
      d.cadence = static_cast<int>(r.integer("cadence", 1));
      if (d.cadence < 1) r.fail(r.line_of("cadence"), "cadence must be >= 1");
      r.guarded("kind", [&] { detail::check_combination(d.kind, d.weight, d.theta); });
      check_model_match(r, d, sc.sim.model);
      sc.diagnostics.push_back(std::move(d));
    } else if (sec.kind == "region") {
      RegionSpec g;
      g.label = sec.label;
      g.region = r.guarded("region", [&] { return region_from_string(r.required_str("region")); });
      g.norm = r.guarded("norm", [&] { return norm_from_string(r.str("norm", "H1")); });
      g.C0 = r.num("C0", g.C0);
      g.b = r.num("b", g.b);
      g.a_ext = r.num("a_ext", g.a_ext);
      g.b_ext = r.num("b_ext", g.b_ext);
      if (!(g.C0 > 0)) r.fail(r.line_of("C0"), "C0 must be positive");
      if (!(g.b >= 0 && g.b < 1)) r.fail(r.line_of("b"), "b must lie in [0,1)");
      sc.regions.push_back(std::move(g));
    }
  }
  if (sc.initial.empty() && !sc.initial_file) {
    throw ConfigError(origin + ": no initial data ([initial.<label>] components or [initial] file)");
  }
  if (!sc.initial.empty() && sc.initial_file) {
    throw ConfigError(origin + ": give either initial components or an initial file, not both");
  }
  std::set<std::string> labels;
  for (const auto& d : sc.diagnostics) labels.insert(d.label);
  for (const auto& g : sc.regions) {
    if (!labels.insert(g.label).second) {
      throw ConfigError(origin + ": label '" + g.label + "' used by both a diagnostic and a region");
    }
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file.string() + ": cannot open scenario file");
  std::stringstream ss;
  ss << in.rdbuf();
  auto base = file.parent_path();
  if (base.empty()) base = ".";
  Scenario sc = parse_scenario(ss.str(), file.string(), base);
  if (const char* root = std::getenv("CHVIRIAL_OUTPUT_ROOT"); root && *root) {
    sc.output_dir = std::filesystem::path(root) / sc.name;
  }
  return sc;
}

/// Builds u0 on the scenario grid.
Field build_initial(const Scenario& sc) {
  if (sc.initial_file) return read_initial_file(*sc.initial_file, sc.sim.grid);
  Field u(sc.sim.grid);
  for (const auto& c : sc.initial) u += evaluate(c.spec, 0.0, sc.sim.grid);
  return u;
}

}  // namespace chvirial::cli
