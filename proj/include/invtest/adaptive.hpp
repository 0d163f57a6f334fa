#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "invtest/noise.hpp"
#include "invtest/parallel.hpp"
#include "invtest/pdps.hpp"
#include "invtest/scenario.hpp"
#include "invtest/testing.hpp"

namespace invtest {

enum class AdaptiveStatus {
  Rejected,
  NotRejected,
  NoMinimizer,    // solver converged but s collapsed: the test never rejects
  NotConverged,   // iteration budget exhausted; excluded from power averages
};

// One two-sample run: the probe is fitted on the design sample y1 and the
// test evaluated on the independent sample y2.
struct AdaptiveRun {
  GridFunction y1;
  GridFunction y2;
  SolveReport report;
  AdaptiveStatus status = AdaptiveStatus::NotConverged;
  std::optional<TestOutcome> outcome;

  bool rejected() const { return status == AdaptiveStatus::Rejected; }
};

inline AdaptiveRun adaptive_test(const GridFunction& y1, const GridFunction& y2,
                                 const Scenario& scenario, double sigma, double alpha,
                                 const PdpsConfig& cfg) {
  check_same_grid(y1, y2);
  if (!(sigma > 0.0)) throw std::invalid_argument("adaptive_test: sigma must be positive");
  const KernelSpec ks = scenario.kernel();
  const GridFunction phi = feature_functional(scenario, y1.grid);

  AdaptiveRun run;
  run.y1 = y1;
  run.y2 = y2;
  run.report = pdps_solve(y1, phi, ks, scenario.t, cfg);
  if (!run.report.converged) {
    run.status = AdaptiveStatus::NotConverged;
    return run;
  }
  if (!run.report.minimizer_found) {
    run.status = AdaptiveStatus::NoMinimizer;
    return run;
  }
  GridFunction probe = recover_probe(run.report);
  const double critical = critical_value(probe, phi, sigma, alpha, ks);
  run.outcome = run_test(y2, TestSpec{std::move(probe), critical, alpha, TestKind::Adaptive});
  run.status = run.outcome->reject ? AdaptiveStatus::Rejected : AdaptiveStatus::NotRejected;
  return run;
}

struct PowerEstimate {
  double power = 0.0;
  double se = 0.0;
  int no_min_count = 0;
  int not_converged = 0;
  int samples = 0;
};

// Empirical power of the two-sample test over M independent design samples.
// Each sample with a recovered probe contributes its conditional power
// Q(q_alpha - J/sigma) in closed form; samples whose solve collapses
// contribute zero; samples whose solve exhausts the iteration budget are
// excluded from the average and counted separately. Sample m draws its noise
// from stream_base + m.
inline PowerEstimate empirical_power(const Scenario& scenario, const PeriodicGrid& grid,
                                     double sigma, double alpha, int samples,
                                     const PdpsConfig& cfg, std::uint64_t seed,
                                     std::uint64_t stream_base = 0, int threads = 0) {
  if (samples < 1) throw std::invalid_argument("empirical_power: need at least one sample");
  if (!(sigma > 0.0)) throw std::invalid_argument("empirical_power: sigma must be positive");
  const KernelSpec ks = scenario.kernel();
  const GridFunction phi = feature_functional(scenario, grid);
  const GridFunction u = truth(scenario, grid);
  const GridFunction ideal = forward(u, ks);
  const double q_alpha = std_normal_quantile(alpha);

  enum class Mark { Power, NoMin, NotConverged };
  std::vector<double> value(samples, 0.0);
  std::vector<Mark> mark(samples, Mark::NotConverged);

  parallel_for(
      samples,
      [&](int m) {
        GridFunction y1 = ideal;
        const NoiseDraw draw = sample_white_noise(grid, seed, stream_base + m);
        for (int j = 0; j < y1.size(); ++j) y1.values[j] += sigma * draw.z.values[j];
        const SolveReport rep = pdps_solve(y1, phi, ks, scenario.t, cfg);
        if (!rep.converged) {
          mark[m] = Mark::NotConverged;
        } else if (!rep.minimizer_found) {
          mark[m] = Mark::NoMin;
        } else {
          const GridFunction probe = recover_probe(rep);
          const double j = j_functional(probe, phi, ideal, ks);
          value[m] = std_normal_cdf(q_alpha - j / sigma);
          mark[m] = Mark::Power;
        }
      },
      cfg.trace ? 1 : threads);

  PowerEstimate est;
  est.samples = samples;
  double sum = 0.0, sum2 = 0.0;
  int used = 0;
  for (int m = 0; m < samples; ++m) {
    if (mark[m] == Mark::NotConverged) {
      ++est.not_converged;
      continue;
    }
    if (mark[m] == Mark::NoMin) ++est.no_min_count;
    sum += value[m];
    sum2 += value[m] * value[m];
    ++used;
  }
  if (used > 0) {
    est.power = sum / used;
    if (used > 1) {
      const double var = std::max(0.0, (sum2 - sum * sum / used) / (used - 1));
      est.se = std::sqrt(var / used);
    }
  }
  return est;
}

// Theoretical lower bound on the power of the two-sample test:
//   sup_{tau} Q(q_alpha + tau/sigma) * P(||Z||_{H^{-t}} < (-minJ - tau)/(2 sigma)),
// with minJ the H^t objective minimum at noiseless data, the tail probability
// estimated by Monte Carlo, and the sup taken over a 50-point log grid on
// [sigma*1e-3, -minJ]. The embedding constant of H^t into L^2 is one.
inline double power_lower_bound(const Scenario& scenario, const PeriodicGrid& grid,
                                double sigma, double alpha, const PdpsConfig& cfg,
                                int mc_draws, std::uint64_t seed) {
  if (!(sigma > 0.0)) throw std::invalid_argument("power_lower_bound: sigma must be positive");
  if (mc_draws < 1) throw std::invalid_argument("power_lower_bound: mc_draws must be >= 1");
  const KernelSpec ks = scenario.kernel();
  const GridFunction phi = feature_functional(scenario, grid);
  const GridFunction u = truth(scenario, grid);
  const GridFunction ideal = forward(u, ks);

  const SolveReport rep = pdps_solve(ideal, phi, ks, scenario.t, cfg);
  if (!rep.minimizer_found) return 0.0;
  const double min_j = j_functional(recover_probe(rep), phi, ideal, ks, scenario.t);
  if (!(min_j < 0.0)) return 0.0;

  std::vector<double> dual_norms(mc_draws);
  parallel_for(mc_draws, [&](int i) {
    dual_norms[i] = dual_sobolev_norm(sample_white_noise(grid, seed, i).z, scenario.t);
  });

  const double q_alpha = std_normal_quantile(alpha);
  const double tau_lo = sigma * 1e-3;
  const double tau_hi = std::max(-min_j, tau_lo);
  double best = 0.0;
  constexpr int kTauPoints = 50;
  for (int i = 0; i < kTauPoints; ++i) {
    const double w = kTauPoints == 1 ? 0.0 : static_cast<double>(i) / (kTauPoints - 1);
    const double tau = tau_lo * std::pow(tau_hi / tau_lo, w);
    const double threshold = (-min_j - tau) / (2.0 * sigma);
    int below = 0;
    for (double dn : dual_norms)
      if (dn < threshold) ++below;
    if (below == 0) continue;
    const double bound = std_normal_cdf(q_alpha + tau / sigma) *
                         (static_cast<double>(below) / mc_draws);
    best = std::max(best, bound);
  }
  return best;
}

}  // namespace invtest
