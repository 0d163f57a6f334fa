#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "invtest/fft.hpp"
#include "invtest/grid.hpp"

namespace invtest {

// Discrete L^2 inner product, (period/n) * sum_j f_j g_j.
inline double l2_inner(const GridFunction& f, const GridFunction& g) {
  check_same_grid(f, g);
  double acc = 0.0;
  for (int j = 0; j < f.size(); ++j) acc += f.values[j] * g.values[j];
  return f.grid.period / f.grid.n * acc;
}

inline double l2_norm(const GridFunction& f) {
  double acc = 0.0;
  for (double v : f.values) acc += v * v;
  return std::sqrt(f.grid.period / f.grid.n * acc);
}

inline double l1_norm(const GridFunction& f) {
  double acc = 0.0;
  for (double v : f.values) acc += std::abs(v);
  return f.grid.period / f.grid.n * acc;
}

inline double max_norm(const GridFunction& f) {
  double acc = 0.0;
  for (double v : f.values) acc = std::max(acc, std::abs(v));
  return acc;
}

// Periodic Fourier coefficients f^(k) = (1/n) sum_j f_j exp(-2*pi*i*k*j/n),
// the midpoint-rule value of period^{-1} * integral of f(x) exp(-2*pi*i*k*x/period).
inline Spectrum periodic_fourier(const GridFunction& f) {
  const int n = f.grid.n;
  Spectrum out(f.grid);
  std::vector<std::complex<double>> in(n);
  for (int j = 0; j < n; ++j) in[j] = f.values[j];
  detail::Fft::of_size(n).forward(in.data(), out.coeffs.data());
  const double scale = 1.0 / n;
  for (auto& c : out.coeffs) c *= scale;
  return out;
}

// Inverse of periodic_fourier. The input must be conjugate symmetric (real
// signal); a violation beyond 1e-10 relative is reported as an error.
inline GridFunction inverse_periodic_fourier(const Spectrum& s) {
  const int n = s.grid.n;
  std::vector<std::complex<double>> out(n);
  detail::Fft::of_size(n).inverse(s.coeffs.data(), out.data());
  GridFunction f(s.grid);
  double max_im = 0.0, max_re = 0.0;
  for (int j = 0; j < n; ++j) {
    f.values[j] = out[j].real();
    max_im = std::max(max_im, std::abs(out[j].imag()));
    max_re = std::max(max_re, std::abs(out[j].real()));
  }
  if (max_im > 1e-10 * std::max(1.0, max_re))
    throw std::runtime_error(
        "inverse_periodic_fourier: coefficients are not conjugate symmetric");
  return f;
}

// Fourier-side weight (1 + k^2)^t.
inline double sobolev_weight(int k, double t) {
  return std::pow(1.0 + static_cast<double>(k) * k, t);
}

// ||f||_{H^t} = period^{1/2} * (sum_k (1 + k^2)^t |f^(k)|^2)^{1/2}.
inline double sobolev_norm(const GridFunction& f, SobolevIndex t) {
  const Spectrum s = periodic_fourier(f);
  double acc = 0.0;
  for (int j = 0; j < s.size(); ++j)
    acc += sobolev_weight(s.grid.freq(j), t.t) * std::norm(s.coeffs[j]);
  return std::sqrt(f.grid.period * acc);
}

// Norm of the dual space H^{-t}; the weight flips to (1 + k^2)^{-t}.
inline double dual_sobolev_norm(const GridFunction& f, SobolevIndex t) {
  const Spectrum s = periodic_fourier(f);
  double acc = 0.0;
  for (int j = 0; j < s.size(); ++j)
    acc += sobolev_weight(s.grid.freq(j), -t.t) * std::norm(s.coeffs[j]);
  return std::sqrt(f.grid.period * acc);
}

inline double sobolev_inner(const GridFunction& f, const GridFunction& g, SobolevIndex t) {
  check_same_grid(f, g);
  const Spectrum sf = periodic_fourier(f);
  const Spectrum sg = periodic_fourier(g);
  double acc = 0.0;
  for (int j = 0; j < sf.size(); ++j)
    acc += sobolev_weight(sf.grid.freq(j), t.t) *
           (sf.coeffs[j] * std::conj(sg.coeffs[j])).real();
  return f.grid.period * acc;
}

// Riesz isomorphism between H^{-t} and H^t: the (1 + k^2)^{-t} Fourier
// multiplier. It carries the L^2 pairing <y, e> into the H^t inner product
// <Ry, e>_{H^t}.
inline GridFunction riesz_map(const GridFunction& y, SobolevIndex t) {
  Spectrum s = periodic_fourier(y);
  for (int j = 0; j < s.size(); ++j)
    s.coeffs[j] *= sobolev_weight(s.grid.freq(j), -t.t);
  return inverse_periodic_fourier(s);
}

}  // namespace invtest
