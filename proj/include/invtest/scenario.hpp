#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "invtest/convolution.hpp"
#include "invtest/grid.hpp"
#include "invtest/spectral.hpp"

namespace invtest {

// Symmetric beta-kernel p(x) ~ x^(shape-1) (l-x)^(shape-1) on [0, l].
// shape = 1 is the indicator of the interval.
struct BetaKernelSpec {
  double l;
  double shape;

  BetaKernelSpec(double l_, double shape_) : l(l_), shape(shape_) {
    if (!(l > 0.0 && l < 1.0))
      throw std::invalid_argument("BetaKernelSpec: l must lie in (0,1)");
    if (!(shape >= 1.0))
      throw std::invalid_argument("BetaKernelSpec: shape must be >= 1");
  }

  // Unnormalized kernel value; tol absorbs roundoff at the interval endpoints.
  double value(double x, double tol = 0.0) const {
    if (x < -tol || x > l + tol) return 0.0;
    if (shape == 1.0) return 1.0;
    const double xc = std::clamp(x, 0.0, l);
    return std::pow(xc, shape - 1.0) * std::pow(l - xc, shape - 1.0);
  }
};

enum class ScenarioKind {
  CompatibleSmooth,     // functional shape 1+2a, truth shape 2
  CompatibleNonsmooth,  // functional shape 1+2a, truth shape 1
  IncompatibleSmooth,   // functional shape 1 (indicator), truth shape 2
};

inline const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::CompatibleSmooth: return "s1";
    case ScenarioKind::CompatibleNonsmooth: return "s2";
    case ScenarioKind::IncompatibleSmooth: return "s3";
  }
  return "?";
}

// Full description of one testing problem: kernel order, support length,
// overlap of the truth with the tested interval, kernel shapes, and the
// smoothness index of the space used by the adaptive test.
struct Scenario {
  ScenarioKind kind;
  double a;
  double l;
  double lambda;
  double beta;   // functional shape
  double gamma;  // truth shape
  SobolevIndex t;

  KernelSpec kernel() const { return KernelSpec(a); }
};

inline Scenario make_scenario(ScenarioKind kind, double a = 2.0, double l = 5.0 / 128,
                              double lambda = 1.0, SobolevIndex t = SobolevIndex(0.51)) {
  if (!(l > 0.0 && l < 1.0))
    throw std::invalid_argument("Scenario: l must lie in (0,1)");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("Scenario: lambda must lie in [0,1]");
  if (!((2.0 - lambda) * l <= 0.5))
    throw std::invalid_argument("Scenario: truth support must stay inside [-1/2, 1/2]");
  Scenario s;
  s.kind = kind;
  s.a = a;
  s.l = l;
  s.lambda = lambda;
  s.t = t;
  switch (kind) {
    case ScenarioKind::CompatibleSmooth:
      s.beta = 1.0 + 2.0 * a;
      s.gamma = 2.0;
      break;
    case ScenarioKind::CompatibleNonsmooth:
      s.beta = 1.0 + 2.0 * a;
      s.gamma = 1.0;
      break;
    case ScenarioKind::IncompatibleSmooth:
      s.beta = 1.0;
      s.gamma = 2.0;
      break;
  }
  KernelSpec check(a);  // validates a
  (void)check;
  return s;
}

// Feature functional: beta-kernel on [0, l], normalized to unit discrete
// L^2 norm.
inline GridFunction feature_functional(const Scenario& s, const PeriodicGrid& grid) {
  const BetaKernelSpec kern(s.l, s.beta);
  const double tol = grid.spacing() * 1e-9;
  GridFunction phi = sample(grid, [&](double x) { return kern.value(x, tol); });
  const double nrm = l2_norm(phi);
  if (!(nrm > 0.0)) throw std::runtime_error("feature_functional: zero sample vector");
  for (auto& v : phi.values) v /= nrm;
  return phi;
}

// Truth: the same kernel shifted right by (1 - lambda) * l and normalized to
// unit discrete L^1 norm. The shift is rounded to the nearest grid point; for
// the built-in support lengths this rounding is what reproduces the reported
// feature sizes.
inline GridFunction truth(const Scenario& s, const PeriodicGrid& grid) {
  const BetaKernelSpec kern(s.l, s.gamma);
  const double h = grid.spacing();
  const double shift = std::round((1.0 - s.lambda) * s.l / h) * h;
  const double tol = h * 1e-9;
  GridFunction u = sample(grid, [&](double x) { return kern.value(x - shift, tol); });
  const double nrm = l1_norm(u);
  if (!(nrm > 0.0)) throw std::runtime_error("truth: zero sample vector");
  for (auto& v : u.values) v /= nrm;
  return u;
}

// Feature size in normalized-vector units: with w the grid spacing this is
// sum_j (sqrt(w) phi_j) (w u_j), the Euclidean pairing of the unit 2-norm
// functional samples with the unit 1-norm truth samples.
inline double feature_value(const GridFunction& phi, const GridFunction& u) {
  return l2_inner(phi, u) * std::sqrt(phi.grid.spacing());
}

}  // namespace invtest
