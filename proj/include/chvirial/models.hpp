#pragma once

// Right-hand sides u_t = F(u) of the Camassa-Holm family and the generalized
// BBM equation, all in the conservative form F = -d_x(local + A nonlocal)
// with A = (1 - d_x^2)^{-1}.

#include <chvirial/grid.hpp>

#include <cmath>
#include <string>
#include <string_view>

namespace chvirial {

enum class Family { CH, DP, BFamily, ElasticRod, GBBM, GBBM_MovingFrame };

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::CH: return "CH";
    case Family::DP: return "DP";
    case Family::BFamily: return "BFamily";
    case Family::ElasticRod: return "ElasticRod";
    case Family::GBBM: return "GBBM";
    case Family::GBBM_MovingFrame: return "GBBM_MovingFrame";
  }
  return "?";
}

inline Family family_from_string(std::string_view s) {
  for (Family f : {Family::CH, Family::DP, Family::BFamily, Family::ElasticRod,
                   Family::GBBM, Family::GBBM_MovingFrame}) {
    if (to_string(f) == s) return f;
  }
  throw Error("unknown model family '" + std::string(s) + "'");
}

struct ModelSpec {
  Family family = Family::CH;
  double b = 2.0;
  double gamma = 1.0;
  int p = 2;

  void validate() const {
    if (family == Family::BFamily && !(b > 0.0 && b < 3.0)) {
      throw Error("ModelSpec: b must lie in (0,3), got " + std::to_string(b));
    }
    if (family == Family::ElasticRod && !(gamma > 0.0 && gamma < 3.0)) {
      throw Error("ModelSpec: gamma must lie in (0,3), got " + std::to_string(gamma));
    }
    if ((family == Family::GBBM || family == Family::GBBM_MovingFrame) && p < 2) {
      throw Error("ModelSpec: p must be an integer >= 2, got " + std::to_string(p));
    }
  }

  bool is_bbm() const {
    return family == Family::GBBM || family == Family::GBBM_MovingFrame;
  }
};

namespace detail {

inline Field ipow(const Field& u, int p) {
  return u.map([p](double v) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= v;
    return r;
  });
}

}  // namespace detail

/// F(u). Quadratic and higher products are truncated to |m| <= N/3; linear
/// terms keep their full spectrum.
inline Field rhs(const ModelSpec& m, const Field& u) {
  m.validate();
  require_finite(u, "rhs");
  const auto& grid = u.grid();

  Field local(grid);
  Field nonlinear(grid);  // quadratic part fed to A
  Field linear(grid);     // linear part fed to A
  bool has_linear = false;

  switch (m.family) {
    case Family::CH:
    case Family::BFamily:
    case Family::ElasticRod: {
      const Field ux = derivative(u, 1);
      const Field u2 = u * u;
      const Field ux2 = ux * ux;
      double cl = 0.5, c2 = 1.0, cx = 0.5;
      if (m.family == Family::BFamily) {
        c2 = 0.5 * m.b;
        cx = 0.5 * (3.0 - m.b);
      } else if (m.family == Family::ElasticRod) {
        cl = 0.5 * m.gamma;
        c2 = 0.5 * (3.0 - m.gamma);
        cx = 0.5 * m.gamma;
      }
      local = cl * u2;
      nonlinear = c2 * u2 + cx * ux2;
      break;
    }
    case Family::DP: {
      const Field u2 = u * u;
      local = 0.5 * u2;
      nonlinear = 1.5 * u2;
      break;
    }
    case Family::GBBM:
      nonlinear = detail::ipow(u, m.p);
      linear = u;
      has_linear = true;
      break;
    case Family::GBBM_MovingFrame:
      nonlinear = detail::ipow(u, m.p);
      linear = derivative(u, 2);
      has_linear = true;
      break;
  }

  auto sl = spectral::forward(local);
  auto sn = spectral::forward(nonlinear);
  spectral::truncate(grid, sl);
  spectral::truncate(grid, sn);
  spectral::Spectrum slin;
  if (has_linear) slin = spectral::forward(linear);

  spectral::Spectrum flux(sl.size());
  for (std::size_t k = 0; k < flux.size(); ++k) {
    const double w = grid.wavenumber(k);
    auto nl = sn[k];
    if (has_linear) nl += slin[k];
    flux[k] = sl[k] + nl / (1.0 + w * w);
  }
  spectral::differentiate(grid, flux, 1);
  for (auto& c : flux) c = -c;
  return spectral::inverse(grid, std::move(flux));
}

/// True iff every value is finite and max|u_x| <= threshold.
inline bool wave_breaking_guard(const Field& u, double threshold) {
  if (!(threshold > 0.0)) throw Error("wave_breaking_guard: threshold must be positive");
  if (u.first_non_finite()) return false;
  return derivative(u, 1).max_abs() <= threshold;
}

/// Default guard: 50 times the initial slope, or 50 for flat data.
inline double default_guard_threshold(const Field& u0) {
  const double s = derivative(u0, 1).max_abs();
  return s > 0.0 ? 50.0 * s : 50.0;
}

/// m0 = u0 - u0_xx >= 0 up to 1e-10.
inline bool sign_condition_m0(const Field& u0) {
  require_finite(u0, "sign_condition_m0");
  const Field m0 = u0 - derivative(u0, 2);
  for (double v : m0.values()) {
    if (v < -1e-10) return false;
  }
  return true;
}

}  // namespace chvirial
