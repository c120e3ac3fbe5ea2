#pragma once

// Closed-form solutions used as initial data and as oracles.

#include <chvirial/grid.hpp>
#include <chvirial/helmholtz.hpp>

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

namespace chvirial {

enum class ExactKind { Peakon, ShockPeakon, BBMSolitary, BBMNegative, Gaussian, MollifiedPeakon };

inline std::string_view to_string(ExactKind k) {
  switch (k) {
    case ExactKind::Peakon: return "Peakon";
    case ExactKind::ShockPeakon: return "ShockPeakon";
    case ExactKind::BBMSolitary: return "BBMSolitary";
    case ExactKind::BBMNegative: return "BBMNegative";
    case ExactKind::Gaussian: return "Gaussian";
    case ExactKind::MollifiedPeakon: return "MollifiedPeakon";
  }
  return "?";
}

inline ExactKind exact_kind_from_string(std::string_view s) {
  for (ExactKind k : {ExactKind::Peakon, ExactKind::ShockPeakon, ExactKind::BBMSolitary,
                      ExactKind::BBMNegative, ExactKind::Gaussian, ExactKind::MollifiedPeakon}) {
    if (to_string(k) == s) return k;
  }
  throw Error("unknown solution kind '" + std::string(s) + "'");
}

struct ExactSpec {
  ExactKind kind = ExactKind::Peakon;
  double c = 1.0;
  double k = 1.0;
  int p = 2;
  double A = 1.0;
  double sigma = 1.0;
  double x0 = 0.0;

  void validate() const {
    switch (kind) {
      case ExactKind::Peakon:
        if (c == 0.0) throw Error("Peakon: c must be nonzero");
        break;
      case ExactKind::ShockPeakon:
        if (!(k > 0.0)) throw Error("ShockPeakon: k must be positive");
        break;
      case ExactKind::BBMSolitary:
        if (!(c > 1.0)) throw Error("BBMSolitary: c must exceed 1");
        if (p < 2) throw Error("BBMSolitary: p must be >= 2");
        break;
      case ExactKind::BBMNegative:
        if (!(c > 0.0)) throw Error("BBMNegative: c must be positive");
        if (p < 2 || p % 2 != 0) throw Error("BBMNegative: p must be even");
        break;
      case ExactKind::Gaussian:
      case ExactKind::MollifiedPeakon:
        if (!(sigma > 0.0)) throw Error(std::string(to_string(kind)) + ": sigma must be positive");
        break;
    }
    if (!std::isfinite(x0)) throw Error("ExactSpec: x0 must be finite");
  }

  /// Solutions that are not in H^1 may only be evaluated, never integrated.
  bool evaluation_only() const { return kind == ExactKind::ShockPeakon; }
};

namespace detail {

/// Representative of x in [-L/2, L/2).
inline double wrap(double x, double len) {
  double r = std::fmod(x + 0.5 * len, len);
  if (r < 0.0) r += len;
  return r - 0.5 * len;
}

inline double bbm_profile(double s, int p) {
  const double ch = std::cosh(0.5 * (p - 1) * s);
  return std::pow((p + 1) / (2.0 * ch * ch), 1.0 / (p - 1));
}

}  // namespace detail

/// Peakon-like data with a nonnegative momentum: m0 is a Gaussian bump of
/// width sigma and mass 2c, and u0 = (1 - d^2)^{-1} m0.
inline Field mollified_peakon(double c, double sigma, const PeriodicGrid& grid,
                              double x0 = 0.0) {
  if (!(sigma > 0.0)) throw Error("mollified_peakon: sigma must be positive");
  const double len = grid.length();
  const double norm = 2.0 * c / (std::sqrt(2.0 * std::numbers::pi) * sigma);
  const Field m0 = Field::sample(grid, [&](double x) {
    const double z = detail::wrap(x - x0, len);
    return norm * std::exp(-z * z / (2.0 * sigma * sigma));
  });
  return helmholtz_inverse(m0, {1.0, HelmholtzPath::FourierSymbol});
}

/// Closed form at a single point of the torus of length `len`. Not defined
/// for MollifiedPeakon, which is only available on a grid.
inline double exact_value(const ExactSpec& s, double t, double x, double len) {
  s.validate();
  switch (s.kind) {
    case ExactKind::Peakon:
      return s.c * std::exp(-std::abs(detail::wrap(x - s.c * t - s.x0, len)));
    case ExactKind::ShockPeakon: {
      if (!(t + s.k > 0.0)) throw Error("ShockPeakon: requires t + k > 0");
      const double z = detail::wrap(x - s.x0, len);
      const double sg = z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0);
      return sg * std::exp(-std::abs(z)) / (t + s.k);
    }
    case ExactKind::BBMSolitary: {
      const double amp = std::pow(s.c - 1.0, 1.0 / (s.p - 1));
      const double scale = std::sqrt((s.c - 1.0) / s.c);
      return amp * detail::bbm_profile(scale * detail::wrap(x - s.c * t - s.x0, len), s.p);
    }
    case ExactKind::BBMNegative: {
      const double amp = std::pow(s.c + 1.0, 1.0 / (s.p - 1));
      const double scale = std::sqrt((s.c + 1.0) / s.c);
      return -amp * detail::bbm_profile(scale * detail::wrap(x + s.c * t - s.x0, len), s.p);
    }
    case ExactKind::Gaussian: {
      const double z = detail::wrap(x - s.x0, len);
      return s.A * std::exp(-z * z / (2.0 * s.sigma * s.sigma));
    }
    case ExactKind::MollifiedPeakon:
      break;
  }
  throw Error("exact_value: " + std::string(to_string(s.kind)) + " has no pointwise closed form");
}

inline Field evaluate(const ExactSpec& s, double t, const PeriodicGrid& grid) {
  s.validate();
  if (s.kind == ExactKind::MollifiedPeakon) return mollified_peakon(s.c, s.sigma, grid, s.x0);
  const double len = grid.length();
  return Field::sample(grid, [&](double x) { return exact_value(s, t, x, len); });
}

/// Dilation lambda(t) = t^b / log t of the decay region I_b(t).
inline double region_scale(double t, double b) {
  if (t < 2.0) throw Error("region_scale: requires t >= 2");
  return std::pow(t, b) / std::log(t);
}

/// Closed form of the integral of the squared shock peakon over |x| <= lambda(t).
inline double shock_peakon_local_l2(double t, double k, double b) {
  if (t < 2.0) throw Error("shock_peakon_local_l2: requires t >= 2");
  if (!(k > 0.0)) throw Error("shock_peakon_local_l2: k must be positive");
  if (!(b > 0.0 && b < 1.0)) throw Error("shock_peakon_local_l2: b must lie in (0,1)");
  const double lam = region_scale(t, b);
  return (1.0 - std::exp(-2.0 * lam)) / ((t + k) * (t + k));
}

}  // namespace chvirial
