#pragma once

#include <chvirial/chvirial.hpp>

#include <cmath>
#include <numbers>
#include <random>

namespace testing_support {

using chvirial::Field;
using chvirial::PeriodicGrid;

inline constexpr double kPi = std::numbers::pi;

inline double max_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

/// Real field with random Fourier modes 1..kmax (plus a mean), amplitudes ~ 1/(1+m).
inline Field random_band_limited(const PeriodicGrid& g, std::size_t kmax, std::mt19937_64& rng,
                                 double mean = 0.0) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> a(kmax + 1), b(kmax + 1);
  for (std::size_t m = 1; m <= kmax; ++m) {
    a[m] = n(rng) / (1.0 + m);
    b[m] = n(rng) / (1.0 + m);
  }
  return Field::sample(g, [&](double x) {
    double s = mean;
    for (std::size_t m = 1; m <= kmax; ++m) {
      const double k = 2.0 * kPi * m / g.length();
      s += a[m] * std::cos(k * x) + b[m] * std::sin(k * x);
    }
    return s;
  });
}

/// Smooth localized random field: random band-limited data times a Gaussian envelope.
inline Field random_localized(const PeriodicGrid& g, std::size_t kmax, double width,
                              std::mt19937_64& rng) {
  Field u = random_band_limited(g, kmax, rng, 0.3);
  const Field env = Field::sample(g, [&](double x) { return std::exp(-x * x / (2 * width * width)); });
  return chvirial::dealias(u * env);
}

}  // namespace testing_support
