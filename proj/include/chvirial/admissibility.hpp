#pragma once

// Numerical proxies for the admissibility conditions on theta(t) used by the
// refined L^1 virial estimates, with lambda taken at b = 1 - a:
//   (1)   t^a (log t)^{1+iota} / theta(t) bounded
//   (1.5) t theta'/theta of order one (checked in [0.5, 2] for t >= 10)
//   (2)   integral of 1/(theta lambda) diverges
//   (3)   integrals of theta' t^a / theta^2 and |lambda'| t^a / (lambda theta) converge
//   (4)   integrals of theta' / theta^2 and |lambda'| / (lambda theta) converge
// Divergence and convergence are judged from the decay of decade blocks
// d_k = integral over [10^k, 10^{k+1}]: fitting d_k ~ k^{-s} over the upper
// half of the decades, s <= 1.1 reads as divergent and s >= 1.25 as convergent.

#include <chvirial/weights.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace chvirial {

struct ThetaAdmissibility {
  ThetaSpec theta;
  double b = 1.0;
  double t_max = 1e4;

  double bound_ratio_max = 0.0;
  bool bounded = false;

  double log_rate_min = 0.0;
  double log_rate_max = 0.0;
  bool log_rate_ok = false;

  /// Fitted decay exponent s of the decade blocks of (2).
  double exponent_2 = 0.0;
  bool divergent = false;

  /// Exponents for the two integrals of (3) and of (4).
  std::array<double, 2> exponent_3{};
  std::array<double, 2> exponent_4{};
  bool convergent_3 = false;
  bool convergent_4 = false;

  bool passed() const { return bounded && log_rate_ok && divergent && convergent_3 && convergent_4; }
};

namespace detail {

/// Integral of f over [t0, t1] in the variable s = log t (composite Simpson).
inline double log_integral(const std::function<double(double)>& f, double t0, double t1) {
  const double s0 = std::log(t0), s1 = std::log(t1);
  const int n = 2 * std::max(8, static_cast<int>(std::ceil((s1 - s0) * 400.0)));
  const double h = (s1 - s0) / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = s0 + i * h;
    const double t = std::exp(s);
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * f(t) * t;
  }
  return acc * h / 3.0;
}

/// Least-squares s with d_k ~ k^{-s} over the upper half of the decades in [10, t_max].
inline double decade_exponent(const std::function<double(double)>& f, double t_max) {
  const int K = static_cast<int>(std::floor(std::log10(t_max) + 1e-9));
  std::vector<double> lk, ld;
  for (int k = std::max(1, K / 2); k < K; ++k) {
    const double d = log_integral(f, std::pow(10.0, k), std::pow(10.0, k + 1));
    lk.push_back(std::log(static_cast<double>(k)));
    ld.push_back(std::log(d));
  }
  const double n = static_cast<double>(lk.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lk.size(); ++i) {
    mx += lk[i] / n;
    my += ld[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lk.size(); ++i) {
    sxy += (lk[i] - mx) * (ld[i] - my);
    sxx += (lk[i] - mx) * (lk[i] - mx);
  }
  return -sxy / sxx;
}

}  // namespace detail

inline ThetaAdmissibility check_theta_admissibility(const ThetaSpec& th, double t_max = 1e4,
                                                    double decade_t_max = 1e16) {
  th.validate();
  if (!(t_max >= 100.0)) throw Error("check_theta_admissibility: t_max must be >= 100");
  if (!(decade_t_max >= 1e6)) throw Error("check_theta_admissibility: decade_t_max must be >= 1e6");
  ThetaAdmissibility r;
  r.theta = th;
  r.b = 1.0 - th.a;
  r.t_max = t_max;
  const double b = r.b;

  const auto theta = [&](double t) { return theta_eval(th, t); };
  const auto lam = [&](double t) { return lambda_of(b, t); };

  const int samples = 2000;
  r.bound_ratio_max = 0.0;
  r.log_rate_min = 1e300;
  r.log_rate_max = -1e300;
  for (int i = 0; i <= samples; ++i) {
    const double t = 2.0 * std::pow(t_max / 2.0, static_cast<double>(i) / samples);
    const double ref = std::pow(t, th.a) * std::pow(std::log(t), 1.0 + th.iota);
    r.bound_ratio_max = std::max(r.bound_ratio_max, ref / theta(t));
    if (t >= 10.0) {
      const double rate = t * theta_dot(th, t) / theta(t);
      r.log_rate_min = std::min(r.log_rate_min, rate);
      r.log_rate_max = std::max(r.log_rate_max, rate);
    }
  }
  r.bounded = r.bound_ratio_max <= 1.0 + 1e-12;
  r.log_rate_ok = r.log_rate_min >= 0.5 && r.log_rate_max <= 2.0;

  const auto inv = [&](double t) { return 1.0 / (theta(t) * lam(t)); };
  r.exponent_2 = detail::decade_exponent(inv, decade_t_max);
  r.divergent = r.exponent_2 <= 1.1;

  const double a = th.a;
  const auto fit = [&](const std::function<double(double)>& f) {
    return detail::decade_exponent(f, decade_t_max);
  };
  r.exponent_3 = {
      fit([&](double t) { return theta_dot(th, t) * std::pow(t, a) / (theta(t) * theta(t)); }),
      fit([&](double t) { return std::abs(lambda_dot(b, t)) * std::pow(t, a) / (lam(t) * theta(t)); })};
  r.exponent_4 = {
      fit([&](double t) { return theta_dot(th, t) / (theta(t) * theta(t)); }),
      fit([&](double t) { return std::abs(lambda_dot(b, t)) / (lam(t) * theta(t)); })};
  r.convergent_3 = r.exponent_3[0] >= 1.25 && r.exponent_3[1] >= 1.25;
  r.convergent_4 = r.exponent_4[0] >= 1.25 && r.exponent_4[1] >= 1.25;
  return r;
}

}  // namespace chvirial
