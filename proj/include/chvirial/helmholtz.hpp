#pragma once

// Nonlocal operators (a - d_x^2)^{-1} and the canonical variables
//   f = (1 - d^2)^{-1} u,   g = (4 - d^2)^{-1} u,   h = (1 - d^2)^{-1} u^2.

#include <chvirial/grid.hpp>

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace chvirial {

enum class HelmholtzPath {
  /// Divide mode m by a + k_m^2. Fast and spectrally accurate.
  FourierSymbol,
  /// Discrete convolution with the periodized Green kernel e^{-sqrt(a)|x|}/(2 sqrt(a)).
  /// Every weight is nonnegative, so the discrete operator is order preserving.
  GreenKernel,
};

struct HelmholtzParam {
  double a = 1.0;
  HelmholtzPath path = HelmholtzPath::FourierSymbol;
};

namespace detail {

inline constexpr int kKernelImages = 3;

/// Quadrature weights W_d for offsets d*dx, d = 0..N-1, such that
/// y_i = sum_j W_{(i-j) mod N} f_j approximates the kernel convolution.
///
/// The raw rectangle rule loses accuracy at the kernel's kink (x = y). The
/// Euler-Maclaurin terms for a derivative jump at a node are folded into the
/// stencil: -dx^2/12 f, +dx^4/720 (3 f'' + a f), with f'' taken as the
/// centred difference. The folded stencil keeps all weights nonnegative as
/// long as dx sqrt(a) is moderate, and the error is O(dx^6) for smooth f.
inline std::vector<double> green_weights(const PeriodicGrid& grid, double a) {
  const std::size_t n = grid.size();
  const double alpha = std::sqrt(a);
  const double dx = grid.spacing();
  const double len = grid.length();
  std::vector<double> w(n);
  for (std::size_t d = 0; d < n; ++d) {
    const double z = static_cast<double>(d) * dx;
    double k = 0.0;
    for (int s = -kKernelImages; s <= kKernelImages; ++s) {
      k += std::exp(-alpha * std::abs(z + s * len));
    }
    w[d] = dx * k / (2.0 * alpha);
  }
  const double dx2 = dx * dx;
  w[0] += -dx2 / 12.0 - dx2 / 120.0 + a * dx2 * dx2 / 720.0;
  w[1] += dx2 / 240.0;
  w[n - 1] += dx2 / 240.0;
  for (std::size_t d = 0; d < n; ++d) {
    if (w[d] < 0.0) {
      throw Error("helmholtz_inverse: grid too coarse for the GreenKernel path "
                  "(dx*sqrt(a) = " + std::to_string(dx * alpha) + ")");
    }
  }
  return w;
}

}  // namespace detail

/// (a - d_x^2)^{-1} f on the torus.
inline Field helmholtz_inverse(const Field& f, HelmholtzParam p = {}) {
  if (!(p.a > 0.0)) {
    throw Error("helmholtz_inverse: shift a must be positive, got " + std::to_string(p.a));
  }
  require_finite(f, "helmholtz_inverse");
  const auto& grid = f.grid();
  auto spec = spectral::forward(f);
  if (p.path == HelmholtzPath::FourierSymbol) {
    for (std::size_t m = 0; m < spec.size(); ++m) {
      const double k = grid.wavenumber(m);
      spec[m] /= p.a + k * k;
    }
    return spectral::inverse(grid, std::move(spec));
  }
  const auto weights = detail::green_weights(grid, p.a);
  const auto wspec = spectral::forward(weights);
  const double n = static_cast<double>(grid.size());
  for (std::size_t m = 0; m < spec.size(); ++m) spec[m] *= n * wspec[m];
  return spectral::inverse(grid, std::move(spec));
}

/// Canonical variable f with u = f - f_xx.
inline Field canonical_f(const Field& u,
                         HelmholtzPath path = HelmholtzPath::FourierSymbol) {
  return helmholtz_inverse(u, {1.0, path});
}

struct CanonicalGH {
  Field g;  ///< (4 - d^2)^{-1} u
  Field h;  ///< (1 - d^2)^{-1} u^2
};

inline CanonicalGH canonical_g_h(const Field& u,
                                 HelmholtzPath path = HelmholtzPath::FourierSymbol) {
  require_finite(u, "canonical_g_h");
  return {helmholtz_inverse(u, {4.0, path}), helmholtz_inverse(u * u, {1.0, path})};
}

}  // namespace chvirial
