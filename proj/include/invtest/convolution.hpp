#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "invtest/grid.hpp"
#include "invtest/spectral.hpp"

namespace invtest {

// Convolution kernel given by the Fourier transform (1 + b^2 xi^2)^{-a}.
// The smoothing order a >= 1/2 keeps the range of the operator inside a
// space of bounded functions.
struct KernelSpec {
  double a = 2.0;
  double b = 0.06;

  KernelSpec() = default;
  explicit KernelSpec(double a_, double b_ = 0.06) : a(a_), b(b_) {
    if (!(a >= 0.5)) throw std::invalid_argument("KernelSpec: a must be >= 1/2");
    if (!(b > 0.0)) throw std::invalid_argument("KernelSpec: b must be positive");
  }
};

// Multiplier of the periodized convolution operator on periodic Fourier
// coefficients: m(k) = (1 + (b/period)^2 k^2)^{-a}. Strictly decreasing in
// |k| with m(0) = 1.
inline double kernel_multiplier(int k, const KernelSpec& ks, const PeriodicGrid& grid) {
  const double r = ks.b / grid.period;
  return std::pow(1.0 + r * r * static_cast<double>(k) * k, -ks.a);
}

namespace detail {

inline std::vector<double> multiplier_table(const KernelSpec& ks, const PeriodicGrid& grid) {
  std::vector<double> m(grid.n);
  for (int j = 0; j < grid.n; ++j) m[j] = kernel_multiplier(grid.freq(j), ks, grid);
  return m;
}

// Real even multipliers map real functions to real functions, so the
// roundoff imaginary residue is dropped without the symmetry check of
// inverse_periodic_fourier (exact inversion can amplify that residue by the
// reciprocal of the smallest multiplier value).
inline GridFunction apply_multiplier(const GridFunction& u, const std::vector<double>& m) {
  const int n = u.grid.n;
  const auto& fft = Fft::of_size(n);
  std::vector<std::complex<double>> buf(n), hat(n);
  for (int j = 0; j < n; ++j) buf[j] = u.values[j];
  fft.forward(buf.data(), hat.data());
  for (int j = 0; j < n; ++j) hat[j] *= m[j] / n;
  fft.inverse(hat.data(), buf.data());
  GridFunction out(u.grid);
  for (int j = 0; j < n; ++j) out.values[j] = buf[j].real();
  return out;
}

}  // namespace detail

// Forward operator: periodic convolution applied spectrally.
inline GridFunction forward(const GridFunction& u, const KernelSpec& ks) {
  return detail::apply_multiplier(u, detail::multiplier_table(ks, u.grid));
}

// The multiplier is real and even, so the operator is self-adjoint in the
// discrete L^2 inner product. Kept as a named operation for symmetry.
inline GridFunction adjoint(const GridFunction& v, const KernelSpec& ks) {
  return forward(v, ks);
}

// Exact inversion of the diagonal operator on the finite grid. The
// ill-posedness of the continuum problem shows up as a large norm of the
// result, which is reported by callers rather than trapped here.
inline GridFunction unregularized_probe(const GridFunction& phi, const KernelSpec& ks) {
  auto m = detail::multiplier_table(ks, phi.grid);
  for (auto& v : m) v = 1.0 / v;
  return detail::apply_multiplier(phi, m);
}

// Tikhonov-filtered probe: multiplier m(k) / (m(k)^2 + beta).
inline GridFunction plugin_probe(const GridFunction& phi, const KernelSpec& ks, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("plugin_probe: beta must be positive");
  auto m = detail::multiplier_table(ks, phi.grid);
  for (auto& v : m) v = v / (v * v + beta);
  return detail::apply_multiplier(phi, m);
}

}  // namespace invtest
