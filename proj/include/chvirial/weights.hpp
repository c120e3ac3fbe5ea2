#pragma once

// Weight profiles phi(z) with analytic derivatives, and the time scalings
// lambda(t) = t^b / log t and theta(t) = t^a (log t)^{1+iota}.

#include <chvirial/grid.hpp>

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace chvirial {

enum class WeightShape { Tanh, Sech2, Sech4, SechS };
enum class WeightCenter { Origin, MovingLine };

inline std::string_view to_string(WeightShape s) {
  switch (s) {
    case WeightShape::Tanh: return "Tanh";
    case WeightShape::Sech2: return "Sech2";
    case WeightShape::Sech4: return "Sech4";
    case WeightShape::SechS: return "SechS";
  }
  return "?";
}

inline WeightShape weight_shape_from_string(std::string_view s) {
  for (auto w : {WeightShape::Tanh, WeightShape::Sech2, WeightShape::Sech4, WeightShape::SechS}) {
    if (to_string(w) == s) return w;
  }
  throw Error("unknown weight shape '" + std::string(s) + "'");
}

inline std::string_view to_string(WeightCenter c) {
  return c == WeightCenter::Origin ? "Origin" : "MovingLine";
}

inline WeightCenter weight_center_from_string(std::string_view s) {
  if (s == "Origin") return WeightCenter::Origin;
  if (s == "MovingLine") return WeightCenter::MovingLine;
  throw Error("unknown weight center '" + std::string(s) + "'");
}

struct WeightSpec {
  WeightShape shape = WeightShape::Tanh;
  /// Only used by SechS: phi(z) = sech(scale z).
  double scale = 4.0;
  double b = 0.5;
  WeightCenter center = WeightCenter::Origin;
  double C0 = 1.0;

  void validate() const {
    if (!(b >= 0.0 && b < 1.0)) throw Error("WeightSpec: b must lie in [0,1)");
    if (!(C0 > 0.0)) throw Error("WeightSpec: C0 must be positive");
    if (shape == WeightShape::SechS && !(scale > 0.0)) throw Error("WeightSpec: scale must be positive");
  }
};

/// phi and its first three derivatives at z.
inline std::array<double, 4> weight_derivatives(const WeightSpec& w, double z) {
  switch (w.shape) {
    case WeightShape::Tanh: {
      const double t = std::tanh(z);
      const double s2 = 1.0 - t * t;
      return {t, s2, -2.0 * t * s2, s2 * (4.0 - 6.0 * s2)};
    }
    case WeightShape::Sech2: {
      const double t = std::tanh(z);
      const double s2 = 1.0 - t * t;
      const double s4 = s2 * s2;
      return {s2, -2.0 * t * s2, 4.0 * s2 - 6.0 * s4, -8.0 * t * s2 + 24.0 * t * s4};
    }
    case WeightShape::Sech4: {
      const double t = std::tanh(z);
      const double s2 = 1.0 - t * t;
      const double s4 = s2 * s2;
      const double s6 = s4 * s2;
      return {s4, -4.0 * t * s4, 16.0 * s4 - 20.0 * s6, -64.0 * t * s4 + 120.0 * t * s6};
    }
    case WeightShape::SechS: {
      const double k = w.scale;
      const double t = std::tanh(k * z);
      const double s = 1.0 / std::cosh(k * z);
      const double s3 = s * s * s;
      return {s, -k * t * s, k * k * (s - 2.0 * s3), k * k * k * t * (6.0 * s3 - s)};
    }
  }
  return {0.0, 0.0, 0.0, 0.0};
}

inline void require_time(double t, const char* where) {
  if (!(t >= 2.0) || !std::isfinite(t)) {
    throw Error(std::string(where) + ": requires t >= 2, got " + std::to_string(t));
  }
}

/// lambda(t) = t^b / log t, with lambda = 1 when b = 0.
inline double lambda_of(double b, double t) {
  require_time(t, "lambda");
  if (b == 0.0) return 1.0;
  return std::pow(t, b) / std::log(t);
}

inline double lambda_dot(double b, double t) {
  require_time(t, "lambda_dot");
  if (b == 0.0) return 0.0;
  const double lg = std::log(t);
  return std::pow(t, b - 1.0) / lg * (b - 1.0 / lg);
}

struct ThetaSpec {
  double a = 0.0;
  double iota = 1.0;

  void validate() const {
    if (!(a >= 0.0 && a < 1.0)) throw Error("ThetaSpec: a must lie in [0,1)");
    if (!(iota > 0.0 && iota <= 1.0)) throw Error("ThetaSpec: iota must lie in (0,1]");
  }
};

/// theta(t) = t^a (log t)^{1+iota}.
inline double theta_eval(const ThetaSpec& s, double t) {
  s.validate();
  require_time(t, "theta");
  return std::pow(t, s.a) * std::pow(std::log(t), 1.0 + s.iota);
}

inline double theta_dot(const ThetaSpec& s, double t) {
  const double lg = std::log(t);
  return theta_eval(s, t) * (s.a + (1.0 + s.iota) / lg) / t;
}

/// Weight center at time t.
inline double weight_center(const WeightSpec& w, double t) {
  return w.center == WeightCenter::MovingLine ? t : 0.0;
}

/// Displacement x - center represented on the torus.
inline double torus_offset(const PeriodicGrid& g, double x, double center) {
  const double len = g.length();
  double r = std::fmod(x - center + 0.5 * len, len);
  if (r < 0.0) r += len;
  return r - 0.5 * len;
}

}  // namespace chvirial
