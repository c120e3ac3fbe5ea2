#pragma once

// Conserved quantities, virial functionals and the analytic right-hand sides
// of their time derivatives, region norms and the leading BBM term.
//
// With z = (x - x_c(t)) / lambda(t), every weight term obeys
//   d/dt phi(z) = -(lambda'/lambda) z phi'(z)
// (the MovingLine center is absorbed by reading u in the comoving frame).

#include <chvirial/grid.hpp>
#include <chvirial/helmholtz.hpp>
#include <chvirial/models.hpp>
#include <chvirial/weights.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chvirial {

struct Conserved {
  double I1 = 0.0;
  double E = 0.0;
  double M_bbm = 0.0;
  double E_bbm = 0.0;
  double E_dp = 0.0;
};

inline Conserved conserved(const ModelSpec& m, const Field& u) {
  require_finite(u, "conserved");
  const Field ux = derivative(u, 1);
  const auto [g, h] = canonical_g_h(u);
  const Field gx = derivative(g, 1);
  const Field gxx = derivative(g, 2);
  const int p = m.p;
  Conserved c;
  c.I1 = quadrature(u);
  c.E = quadrature(u * u + ux * ux);
  c.M_bbm = 0.5 * c.E;
  c.E_bbm = quadrature(u.map([p](double v) { return 0.5 * v * v + std::pow(v, p + 1) / (p + 1); }));
  c.E_dp = quadrature(4.0 * (g * g) + 5.0 * (gx * gx) + gxx * gxx);
  return c;
}

enum class VirialTag {
  CH_I, DP_I, CH_J, DP_K, BBM_I, BBM_J,
  CH_I_theta, DP_I_theta, BBM_I_theta, BBM_J_theta,
  XMoment_CH, XMoment_BBM_even, XMoment_BBM_p2,
};

inline constexpr VirialTag kAllVirialTags[] = {
    VirialTag::CH_I, VirialTag::DP_I, VirialTag::CH_J, VirialTag::DP_K, VirialTag::BBM_I,
    VirialTag::BBM_J, VirialTag::CH_I_theta, VirialTag::DP_I_theta, VirialTag::BBM_I_theta,
    VirialTag::BBM_J_theta, VirialTag::XMoment_CH, VirialTag::XMoment_BBM_even,
    VirialTag::XMoment_BBM_p2};

inline std::string_view to_string(VirialTag t) {
  switch (t) {
    case VirialTag::CH_I: return "CH_I";
    case VirialTag::DP_I: return "DP_I";
    case VirialTag::CH_J: return "CH_J";
    case VirialTag::DP_K: return "DP_K";
    case VirialTag::BBM_I: return "BBM_I";
    case VirialTag::BBM_J: return "BBM_J";
    case VirialTag::CH_I_theta: return "CH_I_theta";
    case VirialTag::DP_I_theta: return "DP_I_theta";
    case VirialTag::BBM_I_theta: return "BBM_I_theta";
    case VirialTag::BBM_J_theta: return "BBM_J_theta";
    case VirialTag::XMoment_CH: return "XMoment_CH";
    case VirialTag::XMoment_BBM_even: return "XMoment_BBM_even";
    case VirialTag::XMoment_BBM_p2: return "XMoment_BBM_p2";
  }
  return "?";
}

inline VirialTag virial_tag_from_string(std::string_view s) {
  for (auto t : kAllVirialTags) {
    if (to_string(t) == s) return t;
  }
  throw Error("unknown virial kind '" + std::string(s) + "'");
}

struct VirialKind {
  VirialTag tag = VirialTag::CH_I;
  /// Power 2k of XMoment_BBM_even.
  int k = 1;

  bool uses_theta() const {
    return tag == VirialTag::CH_I_theta || tag == VirialTag::DP_I_theta ||
           tag == VirialTag::BBM_I_theta || tag == VirialTag::BBM_J_theta;
  }
  bool is_xmoment() const {
    return tag == VirialTag::XMoment_CH || tag == VirialTag::XMoment_BBM_even ||
           tag == VirialTag::XMoment_BBM_p2;
  }
  bool is_bbm() const {
    return tag == VirialTag::BBM_I || tag == VirialTag::BBM_J || tag == VirialTag::BBM_I_theta ||
           tag == VirialTag::BBM_J_theta || tag == VirialTag::XMoment_BBM_even ||
           tag == VirialTag::XMoment_BBM_p2;
  }
  bool is_l1_type() const {
    return tag == VirialTag::CH_I || tag == VirialTag::DP_I || tag == VirialTag::BBM_I ||
           tag == VirialTag::CH_I_theta || tag == VirialTag::DP_I_theta ||
           tag == VirialTag::BBM_I_theta;
  }
  /// Family whose flow the identity describes.
  Family family() const {
    switch (tag) {
      case VirialTag::CH_I: case VirialTag::CH_J: case VirialTag::CH_I_theta:
      case VirialTag::XMoment_CH:
        return Family::CH;
      case VirialTag::DP_I: case VirialTag::DP_K: case VirialTag::DP_I_theta:
        return Family::DP;
      case VirialTag::XMoment_BBM_p2:
        return Family::GBBM;
      default:
        return Family::GBBM_MovingFrame;
    }
  }
};

/// Default weight for each kind.
inline WeightSpec default_weight(VirialTag tag) {
  WeightSpec w;
  if (tag == VirialTag::CH_J || tag == VirialTag::DP_K) {
    w.shape = WeightShape::SechS;
    w.scale = 4.0;
  }
  return w;
}

namespace detail {

inline void check_combination(const VirialKind& k, const WeightSpec& w,
                              const std::optional<ThetaSpec>& th) {
  w.validate();
  if (k.uses_theta() != th.has_value()) {
    throw Error(std::string("virial ") + std::string(to_string(k.tag)) +
                (k.uses_theta() ? ": requires a theta spec" : ": takes no theta spec"));
  }
  if (th) th->validate();
  if (k.is_l1_type() && w.shape != WeightShape::Tanh) {
    throw Error(std::string("virial ") + std::string(to_string(k.tag)) + ": weight must be Tanh");
  }
  if (w.center == WeightCenter::MovingLine && !k.is_bbm()) {
    throw Error(std::string("virial ") + std::string(to_string(k.tag)) +
                ": MovingLine center applies to BBM kinds only");
  }
  if (k.tag == VirialTag::XMoment_BBM_even && k.k < 1) {
    throw Error("virial XMoment_BBM_even: k must be >= 1");
  }
}

/// Samples of z and phi^{(i)}(z) at the grid nodes.
struct WeightSamples {
  double lambda = 1.0;
  double lambda_dot = 0.0;
  std::vector<double> z;
  std::array<Field, 4> d;
};

inline WeightSamples sample_weight(const WeightSpec& w, const PeriodicGrid& g, double t) {
  WeightSamples s{lambda_of(w.b, t), lambda_dot(w.b, t), std::vector<double>(g.size()),
                  {Field(g), Field(g), Field(g), Field(g)}};
  const double c = weight_center(w, t);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double z = torus_offset(g, g.node(j), c) / s.lambda;
    s.z[j] = z;
    const auto d = weight_derivatives(w, z);
    for (int i = 0; i < 4; ++i) s.d[i][j] = d[i];
  }
  return s;
}

/// Integral of a(x) b(x) over the torus.
inline double dot(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s * a.grid().spacing();
}

/// Integral of z phi^{(i)}(z) f.
inline double zdot(const WeightSamples& w, int i, const Field& f) {
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += w.z[j] * w.d[i][j] * f[j];
  return s * f.grid().spacing();
}

/// Smooth window: 1 for |x| <= 0.3L, 0 for |x| >= 0.4L.
inline double moment_window(double x, double len) {
  const double s = (std::abs(x) - 0.3 * len) / (0.1 * len);
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return b / (a + b);
}

struct UnscaledPair {
  double value;
  double rhs;
};

inline UnscaledPair base_virial(const VirialKind& k, const Field& u, double t, const WeightSpec& w) {
  const auto& g = u.grid();
  if (k.is_xmoment()) {
    const double c = weight_center(w, t);
    Field xw(g);
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double x = torus_offset(g, g.node(j), c);
      xw[j] = x * moment_window(x, g.length());
    }
    const double value = dot(xw, u);
    double r = 0.0;
    if (k.tag == VirialTag::XMoment_CH) {
      const Field ux = derivative(u, 1);
      r = 0.5 * quadrature(u * u) + quadrature(helmholtz_inverse(u * u + 0.5 * (ux * ux)));
    } else if (k.tag == VirialTag::XMoment_BBM_p2) {
      r = quadrature(u) + quadrature(u * u);
    } else {
      const int p = 2 * k.k;
      r = quadrature(u.map([p](double v) { return std::pow(v, p); }));
    }
    return {value, r};
  }

  const auto ws = sample_weight(w, g, t);
  const double lam = ws.lambda;
  const double rate = ws.lambda_dot / lam;
  const Field& phi = ws.d[0];
  const Field& dphi = ws.d[1];

  switch (k.tag) {
    case VirialTag::CH_I:
    case VirialTag::CH_I_theta: {
      const Field ux = derivative(u, 1);
      const Field flux = 0.5 * (u * u) + helmholtz_inverse(u * u + 0.5 * (ux * ux));
      return {dot(phi, u), -rate * zdot(ws, 1, u) + dot(dphi, flux) / lam};
    }
    case VirialTag::DP_I:
    case VirialTag::DP_I_theta: {
      const Field u2 = u * u;
      const Field flux = u2 + 3.0 * helmholtz_inverse(u2);
      return {dot(phi, u), -rate * zdot(ws, 1, u) + dot(dphi, flux) / (2.0 * lam)};
    }
    case VirialTag::CH_J: {
      const Field ux = derivative(u, 1);
      const Field dens = u * u + ux * ux;
      const Field ux2 = ux * ux;
      const Field nl = helmholtz_inverse(2.0 * (u * u) + ux2);
      const double r = -rate * zdot(ws, 1, dens) + dot(dphi, u * ux2) / lam + dot(dphi, u * nl) / lam;
      return {dot(phi, dens), r};
    }
    case VirialTag::DP_K: {
      const auto [gg, hh] = canonical_g_h(u);
      const Field gx = derivative(gg, 1);
      const Field gxx = derivative(gg, 2);
      const Field hx = derivative(hh, 1);
      const Field dens = 4.0 * (gg * gg) + 5.0 * (gx * gx) + gxx * gxx;
      const Field u2 = u * u;
      const Field src = (2.0 / 3.0) * (u2 * u) + 4.0 * (gg * hh) - 4.0 * (gg * u2) + gx * hx;
      return {dot(phi, dens), -rate * zdot(ws, 1, dens) + dot(dphi, src) / lam};
    }
    case VirialTag::BBM_I:
    case VirialTag::BBM_I_theta: {
      const Field m = u - derivative(u, 2);
      const double l3 = lam * lam * lam;
      const double r = -rate * zdot(ws, 1, u) + 2.0 * ws.lambda_dot / l3 * dot(ws.d[2], u) +
                       ws.lambda_dot / l3 * zdot(ws, 3, u) + dot(ws.d[3], u) / l3 +
                       dot(dphi, u * u) / lam;
      return {dot(phi, m), r};
    }
    case VirialTag::BBM_J:
    case VirialTag::BBM_J_theta: {
      const Field ux = derivative(u, 1);
      const Field u2 = u * u;
      const Field dens = u2 + ux * ux;
      const Field quad = u2 + 0.5 * (ux * ux) - u * helmholtz_inverse(u);
      const double r = -0.5 * rate * zdot(ws, 1, dens) - dot(dphi, quad) / lam -
                       dot(dphi, u2 * u) / (3.0 * lam) + dot(dphi, u * helmholtz_inverse(u2)) / lam;
      return {0.5 * dot(phi, dens), r};
    }
    default:
      break;
  }
  throw Error("virial: unhandled kind");
}

}  // namespace detail

inline double virial_value(const VirialKind& k, const Field& u, double t, const WeightSpec& w,
                           const std::optional<ThetaSpec>& th = std::nullopt) {
  detail::check_combination(k, w, th);
  require_time(t, "virial_value");
  require_finite(u, "virial_value");
  const double v = detail::base_virial(k, u, t, w).value;
  return th ? v / theta_eval(*th, t) : v;
}

/// Analytic d/dt of virial_value along the matching flow.
inline double virial_rhs(const VirialKind& k, const Field& u, double t, const WeightSpec& w,
                         const std::optional<ThetaSpec>& th = std::nullopt) {
  detail::check_combination(k, w, th);
  require_time(t, "virial_rhs");
  require_finite(u, "virial_rhs");
  const auto [v, r] = detail::base_virial(k, u, t, w);
  if (!th) return r;
  const double theta = theta_eval(*th, t);
  return -theta_dot(*th, t) / (theta * theta) * v + r / theta;
}

enum class Region { I_b, J_b, I_ext };
enum class NormKind { L2, H1 };

inline std::string_view to_string(Region r) {
  switch (r) {
    case Region::I_b: return "I_b";
    case Region::J_b: return "J_b";
    case Region::I_ext: return "I_ext";
  }
  return "?";
}

inline Region region_from_string(std::string_view s) {
  for (auto r : {Region::I_b, Region::J_b, Region::I_ext}) {
    if (to_string(r) == s) return r;
  }
  throw Error("unknown region '" + std::string(s) + "'");
}

inline std::string_view to_string(NormKind n) { return n == NormKind::L2 ? "L2" : "H1"; }

inline NormKind norm_from_string(std::string_view s) {
  if (s == "L2") return NormKind::L2;
  if (s == "H1") return NormKind::H1;
  throw Error("unknown norm '" + std::string(s) + "'");
}

/// Node membership of the open region at time t. I_ext is
/// (-inf, -(1+a)t/8) U ((1+b)t, inf); only |x| <= 0.45L is considered.
inline bool in_region(double x, double t, Region region, double C0, double b, double a_ext,
                      double b_ext) {
  switch (region) {
    case Region::I_b: return std::abs(x) < C0 * lambda_of(b, t);
    case Region::J_b: return std::abs(x - t) < C0 * lambda_of(b, t);
    case Region::I_ext: return x < -(1.0 + a_ext) * t / 8.0 || x > (1.0 + b_ext) * t;
  }
  return false;
}

inline double region_norm(const Field& u, double t, Region region, NormKind norm, double C0 = 1.0,
                          double b = 0.5, double a_ext = 0.0, double b_ext = 0.0) {
  require_time(t, "region_norm");
  require_finite(u, "region_norm");
  if (!(C0 > 0.0)) throw Error("region_norm: C0 must be positive");
  const auto& g = u.grid();
  const double window = 0.45 * g.length();
  std::optional<Field> ux;
  if (norm == NormKind::H1) ux = derivative(u, 1);
  double s = 0.0;
  std::size_t members = 0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.node(j);
    if (std::abs(x) > window || !in_region(x, t, region, C0, b, a_ext, b_ext)) continue;
    ++members;
    s += u[j] * u[j];
    if (ux) s += (*ux)[j] * (*ux)[j];
  }
  if (members == 0) {
    throw Error("region_norm: region " + std::string(to_string(region)) + " at t=" +
                std::to_string(t) + " contains no grid node inside |x| <= 0.45L");
  }
  return std::sqrt(s * g.spacing());
}

/// (1/lambda) * integral of sech^2((x - x_c)/lambda) times u^2 (+ u_x^2 for H1):
/// the integrand of the time-integrability estimates.
inline double local_sech2_density(const Field& u, double t, double b, WeightCenter center,
                                  NormKind norm) {
  const double lam = lambda_of(b, t);
  const auto& g = u.grid();
  const double c = center == WeightCenter::MovingLine ? t : 0.0;
  std::optional<Field> ux;
  if (norm == NormKind::H1) ux = derivative(u, 1);
  double s = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double ch = std::cosh(torus_offset(g, g.node(j), c) / lam);
    double d = u[j] * u[j];
    if (ux) d += (*ux)[j] * (*ux)[j];
    s += d / (ch * ch);
  }
  return s * g.spacing() / lam;
}

struct LeadingTerm {
  double direct;
  double canonical;
};

/// Q_J two ways: directly, and through f = (1 - d^2)^{-1} u using
///   u^2 - u A u = f_xx^2 - f f_xx  and one integration by parts.
inline LeadingTerm leading_term_QJ_both(const Field& u, double t, const WeightSpec& w) {
  w.validate();
  require_time(t, "leading_term_QJ");
  require_finite(u, "leading_term_QJ");
  const auto ws = detail::sample_weight(w, u.grid(), t);
  const double lam = ws.lambda;
  const Field ux = derivative(u, 1);
  const Field f = canonical_f(u);
  const Field fx = derivative(f, 1);
  const Field fxx = derivative(f, 2);
  const Field ux2 = ux * ux;
  const double direct =
      detail::dot(ws.d[1], u * u + 0.5 * ux2 - u * f) / lam;
  const double canonical = detail::dot(ws.d[1], ux2) / (2.0 * lam) +
                           detail::dot(ws.d[1], fx * fx + fxx * fxx) / lam -
                           detail::dot(ws.d[3], f * f) / (2.0 * lam * lam * lam);
  return {direct, canonical};
}

inline double leading_term_QJ(const Field& u, double t, const WeightSpec& w) {
  const auto q = leading_term_QJ_both(u, t, w);
  const double scale = std::max({std::abs(q.direct), std::abs(q.canonical), 1e-300});
  if (std::abs(q.direct - q.canonical) > 1e-9 * scale && std::abs(q.direct - q.canonical) > 1e-14) {
    throw Error("leading_term_QJ: representations disagree (" + std::to_string(q.direct) +
                " vs " + std::to_string(q.canonical) + ")");
  }
  return q.direct;
}

}  // namespace chvirial
