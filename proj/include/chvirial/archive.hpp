#pragma once

// Snapshot archive: one file per run.
//
//   "CHVSNAP1"                      8 bytes
//   header length n                 uint64, little endian
//   header                          n bytes of JSON (config, status, counts)
//   snapshot-major records          per snapshot: t, then N values; f64 LE

#include <chvirial/grid.hpp>
#include <chvirial/integrator.hpp>
#include <chvirial/models.hpp>

#include <nlohmann/json.hpp>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace chvirial {

class ArchiveError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::array<char, 8> kArchiveMagic = {'C', 'H', 'V', 'S', 'N', 'A', 'P', '1'};

inline nlohmann::json to_json(const ModelSpec& m) {
  return {{"family", std::string(to_string(m.family))}, {"b", m.b}, {"gamma", m.gamma}, {"p", m.p}};
}

inline ModelSpec model_from_json(const nlohmann::json& j) {
  ModelSpec m;
  m.family = family_from_string(j.at("family").get<std::string>());
  m.b = j.value("b", m.b);
  m.gamma = j.value("gamma", m.gamma);
  m.p = j.value("p", m.p);
  m.validate();
  return m;
}

inline nlohmann::json to_json(const SimConfig& c) {
  return {{"model", to_json(c.model)},
          {"N", c.grid.size()},
          {"L", c.grid.length()},
          {"dt", c.dt},
          {"T", c.T},
          {"snapshot_stride", c.snapshot_stride},
          {"guard_threshold", c.guard_threshold},
          {"tail_budget", c.tail_budget},
          {"decay_experiment", c.decay_experiment}};
}

inline SimConfig sim_config_from_json(const nlohmann::json& j) {
  SimConfig c;
  c.model = model_from_json(j.at("model"));
  c.grid = PeriodicGrid(j.at("N").get<std::size_t>(), j.at("L").get<double>());
  c.dt = j.at("dt").get<double>();
  c.T = j.at("T").get<double>();
  c.snapshot_stride = j.at("snapshot_stride").get<int>();
  c.guard_threshold = j.value("guard_threshold", 0.0);
  c.tail_budget = j.value("tail_budget", c.tail_budget);
  c.decay_experiment = j.value("decay_experiment", false);
  return c;
}

struct Archive {
  nlohmann::json header;
  SimConfig config;
  std::vector<double> times;
  std::vector<Field> snapshots;
};

namespace detail {

inline std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
  return v;
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
  v = to_le(v);
  os.write(reinterpret_cast<const char*>(&v), 8);
}

inline void put_f64(std::ostream& os, double d) { put_u64(os, std::bit_cast<std::uint64_t>(d)); }

inline double get_f64(const char* p) {
  std::uint64_t v;
  std::memcpy(&v, p, 8);
  return std::bit_cast<double>(to_le(v));
}

}  // namespace detail

/// Writes to a temporary sibling and renames, so readers never see a partial file.
inline void write_archive(const std::filesystem::path& path, const SimConfig& cfg,
                          const Trajectory& traj, nlohmann::json extra = nlohmann::json::object()) {
  if (traj.snapshots.size() != traj.times.size()) {
    throw ArchiveError("write_archive: trajectory holds no stored snapshots");
  }
  nlohmann::json header = std::move(extra);
  header["config"] = to_json(cfg);
  header["status"] = std::string(to_string(traj.status));
  header["failure_time"] = traj.failure_time;
  header["message"] = traj.message;
  header["snapshot_count"] = traj.times.size();
  const std::string text = header.dump();

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ArchiveError("write_archive: cannot open " + tmp.string());
    os.write(kArchiveMagic.data(), kArchiveMagic.size());
    detail::put_u64(os, text.size());
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (std::size_t s = 0; s < traj.times.size(); ++s) {
      detail::put_f64(os, traj.times[s]);
      for (double v : traj.snapshots[s].values()) detail::put_f64(os, v);
    }
    if (!os) throw ArchiveError("write_archive: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline Archive read_archive(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ArchiveError("archive " + path.string() + ": cannot open");
  std::vector<char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  const auto where = [&](const std::string& what) {
    return ArchiveError("archive " + path.string() + ": " + what);
  };

  if (bytes.size() < 16 || std::memcmp(bytes.data(), kArchiveMagic.data(), 8) != 0) {
    throw where("bad magic (not a snapshot archive)");
  }
  std::uint64_t hlen;
  std::memcpy(&hlen, bytes.data() + 8, 8);
  hlen = detail::to_le(hlen);
  if (hlen > bytes.size() - 16) throw where("header length " + std::to_string(hlen) + " exceeds file size");

  Archive a;
  try {
    a.header = nlohmann::json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(hlen));
    a.config = sim_config_from_json(a.header.at("config"));
  } catch (const nlohmann::json::exception& e) {
    throw where(std::string("corrupt header: ") + e.what());
  } catch (const Error& e) {
    throw where(std::string("invalid header: ") + e.what());
  }

  const std::size_t n = a.config.grid.size();
  const std::size_t count = a.header.value("snapshot_count", std::size_t{0});
  const std::size_t record = (n + 1) * 8;
  const std::size_t body = bytes.size() - 16 - hlen;
  if (body != count * record) {
    throw where("payload holds " + std::to_string(body) + " bytes, expected " +
                std::to_string(count * record) + " for " + std::to_string(count) +
                " snapshots (truncated or padded; first incomplete snapshot index " +
                std::to_string(body / record) + ")");
  }

  const char* p = bytes.data() + 16 + hlen;
  for (std::size_t s = 0; s < count; ++s, p += record) {
    const double t = detail::get_f64(p);
    if (!std::isfinite(t) || (!a.times.empty() && !(t > a.times.back()))) {
      throw where("snapshot " + std::to_string(s) + ": time stamp not increasing");
    }
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) {
      v[j] = detail::get_f64(p + 8 * (j + 1));
      if (!std::isfinite(v[j])) {
        throw where("snapshot " + std::to_string(s) + " (t=" + std::to_string(t) +
                    "): non-finite value at index " + std::to_string(j));
      }
    }
    a.times.push_back(t);
    a.snapshots.emplace_back(a.config.grid, std::move(v));
  }
  return a;
}

}  // namespace chvirial
