#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace invtest {

// Uniform grid for 2-periodic functions on [-period/2, period/2).
//
// Samples and Fourier coefficients are stored in wrapped (FFT) order: slot j
// holds the entry for integer index k = j for j < n/2 and k = j - n otherwise,
// so the index set is {-n/2, ..., n/2 - 1}.
struct PeriodicGrid {
  int n = 1024;
  double period = 2.0;

  PeriodicGrid() = default;
  explicit PeriodicGrid(int n_, double period_ = 2.0) : n(n_), period(period_) {
    if (n < 4 || n % 2 != 0)
      throw std::invalid_argument("PeriodicGrid: n must be even and >= 4");
    if (!(period > 0.0) || !std::isfinite(period))
      throw std::invalid_argument("PeriodicGrid: period must be positive");
  }

  double spacing() const { return period / n; }

  // Integer frequency for storage slot j.
  int freq(int j) const { return j < n / 2 ? j : j - n; }

  // Storage slot for integer frequency k in {-n/2, ..., n/2 - 1}.
  int slot(int k) const { return k >= 0 ? k : k + n; }

  // Grid point x_k = period*k/n belonging to slot j.
  double point(int j) const { return period * freq(j) / n; }

  bool operator==(const PeriodicGrid&) const = default;
};

// Real-valued samples of a periodic function.
struct GridFunction {
  PeriodicGrid grid;
  std::vector<double> values;

  GridFunction() : values(grid.n, 0.0) {}
  explicit GridFunction(PeriodicGrid g) : grid(g), values(g.n, 0.0) {}
  GridFunction(PeriodicGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (static_cast<int>(values.size()) != grid.n)
      throw std::invalid_argument("GridFunction: value count does not match grid");
  }

  int size() const { return grid.n; }
  double& operator[](int j) { return values[j]; }
  double operator[](int j) const { return values[j]; }
};

// Periodic Fourier coefficients of a grid function.
struct Spectrum {
  PeriodicGrid grid;
  std::vector<std::complex<double>> coeffs;

  Spectrum() : coeffs(grid.n, 0.0) {}
  explicit Spectrum(PeriodicGrid g) : grid(g), coeffs(g.n, 0.0) {}
  Spectrum(PeriodicGrid g, std::vector<std::complex<double>> c)
      : grid(g), coeffs(std::move(c)) {
    if (static_cast<int>(coeffs.size()) != grid.n)
      throw std::invalid_argument("Spectrum: coefficient count does not match grid");
  }

  int size() const { return grid.n; }
  // Coefficient for integer frequency k.
  std::complex<double>& at_freq(int k) { return coeffs[grid.slot(k)]; }
  std::complex<double> at_freq(int k) const { return coeffs[grid.slot(k)]; }
};

// Smoothness index t >= 0 selecting a space in the H^t scale.
struct SobolevIndex {
  double t = 0.0;

  SobolevIndex() = default;
  explicit SobolevIndex(double t_) : t(t_) {
    if (!(t >= 0.0) || !std::isfinite(t))
      throw std::invalid_argument("SobolevIndex: t must be a nonnegative real");
  }
};

// Sample a callable x -> f(x) on the grid.
template <typename F>
GridFunction sample(const PeriodicGrid& grid, F&& f) {
  GridFunction out(grid);
  for (int j = 0; j < grid.n; ++j) out.values[j] = f(grid.point(j));
  return out;
}

inline void check_same_grid(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid == g.grid))
    throw std::invalid_argument("grid mismatch between grid functions");
}

}  // namespace invtest
