#pragma once

// Periodic uniform grid, real grid functions and the pseudospectral
// primitives (differentiation, quadrature, 2/3-rule dealiasing) that every
// other module is built on. The real line is approximated by the torus
// [-L/2, L/2).

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chvirial {

/// Error raised for violated preconditions and invalid specifications.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PeriodicGrid {
 public:
  PeriodicGrid(std::size_t n, double length) : n_(n), length_(length) {
    if (n < 16 || (n & (n - 1)) != 0) {
      throw Error("PeriodicGrid: N must be a power of two >= 16, got " +
                  std::to_string(n));
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
      throw Error("PeriodicGrid: L must be positive and finite");
    }
  }

  std::size_t size() const { return n_; }
  double length() const { return length_; }
  double spacing() const { return length_ / static_cast<double>(n_); }

  /// x_j = -L/2 + j L/N.
  double node(std::size_t j) const {
    return -0.5 * length_ + static_cast<double>(j) * spacing();
  }

  std::vector<double> nodes() const {
    std::vector<double> x(n_);
    for (std::size_t j = 0; j < n_; ++j) x[j] = node(j);
    return x;
  }

  /// Wavenumber 2 pi m / L of the half-spectrum index m in [0, N/2].
  double wavenumber(std::size_t m) const {
    return 2.0 * std::numbers::pi * static_cast<double>(m) / length_;
  }

  std::size_t spectrum_size() const { return n_ / 2 + 1; }

  /// Largest retained |m| under the 2/3 rule.
  std::size_t dealias_cutoff() const { return n_ / 3; }

  friend bool operator==(const PeriodicGrid&, const PeriodicGrid&) = default;

 private:
  std::size_t n_;
  double length_;
};

/// Real-valued grid function. Values may transiently be non-finite (e.g. a
/// diverging integrator stage); operations that need finite input check it
/// and name the first offending index.
class Field {
 public:
  explicit Field(PeriodicGrid grid) : grid_(grid), values_(grid.size(), 0.0) {}

  Field(PeriodicGrid grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw Error("Field: expected " + std::to_string(grid_.size()) +
                  " values, got " + std::to_string(values_.size()));
    }
  }

  template <typename F>
  static Field sample(const PeriodicGrid& grid, F&& fn) {
    Field f(grid);
    for (std::size_t j = 0; j < grid.size(); ++j) f.values_[j] = fn(grid.node(j));
    return f;
  }

  static Field constant(const PeriodicGrid& grid, double c) {
    Field f(grid);
    std::fill(f.values_.begin(), f.values_.end(), c);
    return f;
  }

  const PeriodicGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }
  double& operator[](std::size_t j) { return values_[j]; }

  std::optional<std::size_t> first_non_finite() const {
    for (std::size_t j = 0; j < values_.size(); ++j) {
      if (!std::isfinite(values_[j])) return j;
    }
    return std::nullopt;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  Field& operator+=(const Field& o) {
    check_same_grid(o);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += o.values_[j];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_same_grid(o);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= o.values_[j];
    return *this;
  }
  /// Pointwise product.
  Field& operator*=(const Field& o) {
    check_same_grid(o);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] *= o.values_[j];
    return *this;
  }
  Field& operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, const Field& b) { return a *= b; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator-(Field a) { return a *= -1.0; }

  /// Pointwise map.
  template <typename F>
  Field map(F&& fn) const {
    Field r(grid_);
    for (std::size_t j = 0; j < values_.size(); ++j) r.values_[j] = fn(values_[j]);
    return r;
  }

 private:
  void check_same_grid(const Field& o) const {
    if (!(grid_ == o.grid_)) throw Error("Field: grid mismatch");
  }

  PeriodicGrid grid_;
  std::vector<double> values_;
};

/// Throws if `f` holds NaN/Inf, naming `where` and the first bad index.
inline void require_finite(const Field& f, const char* where) {
  if (auto bad = f.first_non_finite()) {
    throw Error(std::string(where) + ": non-finite value at index " +
                std::to_string(*bad));
  }
}

namespace spectral {

using Spectrum = std::vector<std::complex<double>>;

namespace detail {

struct Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

// The FFTW planner is not thread safe; execution of an existing plan on new
// arrays is. Plans are created once per size and kept for the process.
inline const Plans& plans_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<Plans>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<Plans>();
    const int ni = static_cast<int>(n);
    double* in = fftw_alloc_real(n);
    fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    slot->forward = fftw_plan_dft_r2c_1d(ni, in, out, flags);
    slot->backward = fftw_plan_dft_c2r_1d(ni, out, in, flags);
    fftw_free(in);
    fftw_free(out);
  }
  return *slot;
}

}  // namespace detail

/// Normalized half spectrum: c_m = (1/N) sum_j f_j exp(-2 pi i m j / N).
inline Spectrum forward(std::span<const double> values) {
  const std::size_t n = values.size();
  const auto& plans = detail::plans_for(n);
  std::vector<double> in(values.begin(), values.end());
  Spectrum out(n / 2 + 1);
  fftw_execute_dft_r2c(plans.forward, in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& c : out) c *= scale;
  return out;
}

inline Spectrum forward(const Field& f) { return forward(f.values()); }

/// Inverse of `forward`; `spec` is taken by value because c2r clobbers it.
inline Field inverse(const PeriodicGrid& grid, Spectrum spec) {
  const std::size_t n = grid.size();
  if (spec.size() != n / 2 + 1) throw Error("spectral::inverse: size mismatch");
  const auto& plans = detail::plans_for(n);
  std::vector<double> out(n);
  fftw_execute_dft_c2r(plans.backward, reinterpret_cast<fftw_complex*>(spec.data()),
                       out.data());
  return Field(grid, std::move(out));
}

/// Multiplies each mode by (i k)^order. The Nyquist mode is dropped for every
/// order so that repeated first derivatives equal the higher-order one.
inline void differentiate(const PeriodicGrid& grid, Spectrum& spec, int order) {
  const std::size_t nyq = grid.size() / 2;
  for (std::size_t m = 0; m < spec.size(); ++m) {
    if (m == nyq) {
      spec[m] = 0.0;
      continue;
    }
    const double k = grid.wavenumber(m);
    std::complex<double> mult(1.0, 0.0);
    for (int i = 0; i < order; ++i) mult *= std::complex<double>(0.0, k);
    spec[m] *= mult;
  }
}

inline void truncate(const PeriodicGrid& grid, Spectrum& spec) {
  const std::size_t cut = grid.dealias_cutoff();
  for (std::size_t m = cut + 1; m < spec.size(); ++m) spec[m] = 0.0;
}

}  // namespace spectral

/// Spectral derivative of order 1, 2 or 3 with wavenumbers 2 pi m / L.
inline Field derivative(const Field& f, int order) {
  if (order < 1 || order > 3) {
    throw Error("derivative: order must be 1, 2 or 3, got " + std::to_string(order));
  }
  require_finite(f, "derivative");
  auto spec = spectral::forward(f);
  spectral::differentiate(f.grid(), spec, order);
  return spectral::inverse(f.grid(), std::move(spec));
}

/// Rectangle rule (L/N) sum_j f_j; spectrally accurate for smooth periodic f.
inline double quadrature(const Field& f) {
  require_finite(f, "quadrature");
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.grid().spacing();
}

/// Zeroes Fourier modes with |m| > N/3.
inline Field dealias(const Field& f) {
  require_finite(f, "dealias");
  auto spec = spectral::forward(f);
  spectral::truncate(f.grid(), spec);
  return spectral::inverse(f.grid(), std::move(spec));
}

}  // namespace chvirial
