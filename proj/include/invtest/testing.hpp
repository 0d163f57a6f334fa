#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "invtest/convolution.hpp"
#include "invtest/grid.hpp"
#include "invtest/spectral.hpp"

namespace invtest {

// Standard normal CDF via the complementary error function.
inline double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

// Inverse standard normal CDF. Rational initial guess (Acklam) polished by
// two Halley steps on the erfc-based CDF; absolute error is far below 1e-9
// over the open unit interval. The upper half reduces to the lower half
// through the exact subtraction 1 - p, which keeps full relative precision
// in both tails and makes q(p) = -q(1-p) hold identically.
inline double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("std_normal_quantile: p must lie in (0,1)");
  if (p > 0.5) return -std_normal_quantile(1.0 - p);

  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  // x <= 0 here, so the lower-tail CDF keeps full relative precision
  for (int i = 0; i < 2; ++i) {
    const double err = std_normal_cdf(x) - p;
    const double u = err * 2.506628274631000502 * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

enum class TestKind { Unregularized, Plugin, Oracle, Adaptive };

// One-sided linear test: reject when <Y, probe> exceeds the critical value.
struct TestSpec {
  GridFunction probe;
  double critical;
  double alpha;
  TestKind kind;
};

struct TestOutcome {
  bool reject;
  double statistic;
  double critical;
};

// Critical value sigma * q_{1-alpha} * ||probe||_{L^2} plus the sup-norm
// residual of the adjoint equation; the residual term is the computable
// surcharge that bounds the bias of the statistic for unit-L^1 truths.
inline double critical_value(const GridFunction& probe, const GridFunction& phi, double sigma,
                             double alpha, const KernelSpec& ks) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("critical_value: sigma must be >= 0");
  const GridFunction back = adjoint(probe, ks);
  double resid = 0.0;
  for (int j = 0; j < back.size(); ++j)
    resid = std::max(resid, std::abs(back.values[j] - phi.values[j]));
  return sigma * std_normal_quantile(1.0 - alpha) * l2_norm(probe) + resid;
}

// Evaluate the test; ties do not reject.
inline TestOutcome run_test(const GridFunction& y, const TestSpec& spec) {
  check_same_grid(y, spec.probe);
  const double statistic = l2_inner(y, spec.probe);
  return TestOutcome{statistic > spec.critical, statistic, spec.critical};
}

// Objective driving the probe choice:
//   (||T probe - phi||_inf - <y, probe>) / ||probe||,
// with the norm in the denominator either L^2 or H^t. Negative values are
// what give a test power beyond its level.
inline double j_functional(const GridFunction& probe, const GridFunction& phi,
                           const GridFunction& y, const KernelSpec& ks,
                           std::optional<SobolevIndex> norm_space = std::nullopt) {
  const double denom = norm_space ? sobolev_norm(probe, *norm_space) : l2_norm(probe);
  if (!(denom > 0.0))
    throw std::invalid_argument("j_functional: probe must be nonzero");
  const GridFunction back = adjoint(probe, ks);
  double resid = 0.0;
  for (int j = 0; j < back.size(); ++j)
    resid = std::max(resid, std::abs(back.values[j] - phi.values[j]));
  return (resid - l2_inner(y, probe)) / denom;
}

// Exact power of the calibrated test for a known truth:
//   Q(q_alpha - J / sigma)
// with J evaluated at noiseless data and the L^2 denominator.
inline double exact_power(const GridFunction& probe, const GridFunction& phi,
                          const GridFunction& u, double sigma, double alpha,
                          const KernelSpec& ks) {
  if (!(sigma > 0.0)) throw std::invalid_argument("exact_power: sigma must be positive");
  const double j = j_functional(probe, phi, forward(u, ks), ks);
  return std_normal_cdf(std_normal_quantile(alpha) - j / sigma);
}

}  // namespace invtest
