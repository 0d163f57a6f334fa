#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "invtest/convolution.hpp"
#include "invtest/grid.hpp"
#include "invtest/spectral.hpp"

namespace invtest {

// Primal variable of the convex surrogate problem. The probe functional is
// recovered as e / s once s stays away from zero.
struct ProbePair {
  GridFunction e;
  double s = 0.0;
};

struct PdpsConfig {
  double tau = 0.25;
  double rho = 0.25;
  int max_iter = 20000;
  double tol = 1e-6;      // relative-change stopping threshold
  double s_floor = 1e-8;  // below this (times max(1, ||e||)) s counts as collapsed
  std::ostream* trace = nullptr;  // per-iteration CSV diagnostics when set

  void validate() const {
    // step condition tau*rho*||K||^2 < 1 checked with the proven bound ||K|| <= 2
    if (!(tau > 0.0 && rho > 0.0 && tau * rho * 4.0 < 1.0))
      throw std::invalid_argument("PdpsConfig: need tau, rho > 0 with tau*rho*4 < 1");
    if (max_iter < 1) throw std::invalid_argument("PdpsConfig: max_iter must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("PdpsConfig: tol must be positive");
    if (!(s_floor >= 0.0)) throw std::invalid_argument("PdpsConfig: s_floor must be >= 0");
  }
};

struct SolveReport {
  ProbePair pair;
  double objective = 0.0;  // surrogate value at the returned pair
  int iterations = 0;
  bool converged = false;       // relative change fell below tol
  bool minimizer_found = false;  // converged and s above the collapse floor
};

// Surrogate objective ||T e - s phi||_inf - <y, e>. Positively homogeneous
// and convex; negative values certify a probe with nontrivial power.
inline double surrogate_objective(const ProbePair& p, const GridFunction& phi,
                                  const GridFunction& y, const KernelSpec& ks,
                                  SobolevIndex /*t*/ = SobolevIndex(0.0)) {
  const GridFunction te = adjoint(p.e, ks);
  double resid = 0.0;
  for (int j = 0; j < te.size(); ++j)
    resid = std::max(resid, std::abs(te.values[j] - p.s * phi.values[j]));
  return resid - l2_inner(y, p.e);
}

// K(e, s) = T e - s phi, mapping H^t x R into L^2.
inline GridFunction apply_K(const ProbePair& p, const GridFunction& phi, const KernelSpec& ks) {
  GridFunction out = adjoint(p.e, ks);
  for (int j = 0; j < out.size(); ++j) out.values[j] -= p.s * phi.values[j];
  return out;
}

// Adjoint of K: r |-> (R T r, -<phi, r>), with R the Riesz map of H^t.
inline ProbePair apply_K_star(const GridFunction& r, const GridFunction& phi,
                              const KernelSpec& ks, SobolevIndex t) {
  return ProbePair{riesz_map(forward(r, ks), t), -l2_inner(phi, r)};
}

namespace detail {

// theta solving sum_i max(|v_i| - theta, 0) = radius, by exact water-filling
// on the sorted magnitudes.
inline double l1_projection_threshold(const std::vector<double>& v, double radius,
                                      std::vector<double>& scratch) {
  scratch.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) scratch[i] = std::abs(v[i]);
  std::sort(scratch.begin(), scratch.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < scratch.size(); ++i) {
    cumsum += scratch[i];
    const double cand = (cumsum - radius) / static_cast<double>(i + 1);
    if (scratch[i] > cand) theta = cand;
    else break;
  }
  return theta;
}

inline void proj_l1_ball_inplace(std::vector<double>& v, double radius,
                                 std::vector<double>& scratch) {
  double sum = 0.0;
  for (double x : v) sum += std::abs(x);
  if (sum <= radius) return;
  const double theta = l1_projection_threshold(v, radius, scratch);
  for (auto& x : v) {
    const double mag = std::abs(x) - theta;
    x = mag > 0.0 ? (x > 0.0 ? mag : -mag) : 0.0;
  }
}

}  // namespace detail

// Euclidean projection onto { w : ||w||_1 <= radius }. Vectors already inside
// the ball are returned unchanged; otherwise soft thresholding at the unique
// water-filling level, preserving signs.
inline std::vector<double> proj_l1_ball(std::vector<double> v, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("proj_l1_ball: radius must be positive");
  std::vector<double> scratch;
  detail::proj_l1_ball_inplace(v, radius, scratch);
  return v;
}

// Proximal map of the primal block: shift e by tau * R y, project e onto the
// H^t unit ball (radial rescale) and clip s to [0, inf).
inline ProbePair prox_F(const ProbePair& p, const GridFunction& y, double tau, SobolevIndex t) {
  if (!(tau > 0.0)) throw std::invalid_argument("prox_F: tau must be positive");
  ProbePair out = p;
  const GridFunction ry = riesz_map(y, t);
  for (int j = 0; j < out.e.size(); ++j) out.e.values[j] += tau * ry.values[j];
  const double nrm = sobolev_norm(out.e, t);
  if (nrm > 1.0)
    for (auto& v : out.e.values) v /= nrm;
  out.s = std::max(out.s, 0.0);
  return out;
}

// Primal-dual proximal splitting on the surrogate problem
//   min ||T e - s phi||_inf - <y, e>   over  ||e||_{H^t} <= 1, s >= 0,
// with extrapolated primal iterates and the dual step realized as the
// projection onto the L^1 ball of the quadrature weights. The primal
// iterate starts from the normalized exact-inversion probe.
inline SolveReport pdps_solve(const GridFunction& y, const GridFunction& phi,
                              const KernelSpec& ks, SobolevIndex t, const PdpsConfig& cfg) {
  cfg.validate();
  check_same_grid(y, phi);
  const PeriodicGrid grid = y.grid;
  const int n = grid.n;
  const double quad = grid.period / n;  // quadrature weight of the discrete pairing
  const auto& fft = detail::Fft::of_size(n);

  std::vector<double> mk(n), wt(n);
  for (int j = 0; j < n; ++j) {
    mk[j] = kernel_multiplier(grid.freq(j), ks, grid);
    wt[j] = sobolev_weight(grid.freq(j), t.t);
  }

  using cvec = std::vector<std::complex<double>>;
  cvec buf(n), eh(n), eh_new(n), kxh(n), kx(n), tau_ry(n);
  std::vector<double> r(n), scratch;

  // spectra of phi and y
  for (int j = 0; j < n; ++j) buf[j] = phi.values[j];
  cvec phih(n);
  fft.forward(buf.data(), phih.data());
  for (auto& c : phih) c /= n;
  double phi_norm2 = 0.0;
  for (int j = 0; j < n; ++j) phi_norm2 += std::norm(phih[j]);
  if (!(phi_norm2 > 0.0)) throw std::invalid_argument("pdps_solve: phi must be nonzero");

  for (int j = 0; j < n; ++j) buf[j] = y.values[j];
  cvec yh(n);
  fft.forward(buf.data(), yh.data());
  for (int j = 0; j < n; ++j) tau_ry[j] = cfg.tau * yh[j] / (n * wt[j]);

  // initial primal: exact-inversion probe normalized in H^t, s = 1/||Phi0||
  double phi0_ht = 0.0;
  for (int j = 0; j < n; ++j) {
    eh[j] = phih[j] / mk[j];
    phi0_ht += wt[j] * std::norm(eh[j]);
  }
  phi0_ht = std::sqrt(grid.period * phi0_ht);
  for (auto& c : eh) c /= phi0_ht;
  double s = 1.0 / phi0_ht;

  // initial dual: residual of the primal initialization
  for (int j = 0; j < n; ++j) kxh[j] = mk[j] * eh[j];
  fft.inverse(kxh.data(), kx.data());
  for (int j = 0; j < n; ++j) r[j] = kx[j].real() - s * phi.values[j];

  // tau * (multiplier of K* on the raw forward transform of r)
  std::vector<double> kstar_mul(n);
  for (int j = 0; j < n; ++j) kstar_mul[j] = cfg.tau * mk[j] / (wt[j] * n);

  const double l1_radius = static_cast<double>(n) / grid.period;

  if (cfg.trace) *cfg.trace << "iteration,objective,e_norm,s\n";

  int iterations = 0;
  bool converged = false;
  while (iterations < cfg.max_iter) {
    ++iterations;

    // primal step: x - tau K* r, then prox of F
    for (int j = 0; j < n; ++j) buf[j] = r[j];
    fft.forward(buf.data(), kxh.data());
    double pr = 0.0;
    for (int j = 0; j < n; ++j) pr += phi.values[j] * r[j];
    double s_new = std::max(s + cfg.tau * quad * pr, 0.0);

    double ht2 = 0.0;
    for (int j = 0; j < n; ++j) {
      eh_new[j] = eh[j] - kstar_mul[j] * kxh[j] + tau_ry[j];
      ht2 += wt[j] * std::norm(eh_new[j]);
    }
    const double ht_norm = std::sqrt(grid.period * ht2);
    if (ht_norm > 1.0)
      for (auto& c : eh_new) c /= ht_norm;

    // dual step on the extrapolated point 2 x^{k+1} - x^k
    for (int j = 0; j < n; ++j) kxh[j] = mk[j] * (2.0 * eh_new[j] - eh[j]);
    fft.inverse(kxh.data(), kx.data());
    const double s_bar = 2.0 * s_new - s;
    for (int j = 0; j < n; ++j)
      r[j] += cfg.rho * (kx[j].real() - s_bar * phi.values[j]);
    detail::proj_l1_ball_inplace(r, l1_radius, scratch);

    // relative change in the product norm of H^t x R
    double dn2 = (s_new - s) * (s_new - s);
    double xn2 = s * s;
    for (int j = 0; j < n; ++j) {
      dn2 += grid.period * wt[j] * std::norm(eh_new[j] - eh[j]);
      xn2 += grid.period * wt[j] * std::norm(eh[j]);
    }
    eh.swap(eh_new);
    s = s_new;

    if (cfg.trace) {
      for (int j = 0; j < n; ++j) kxh[j] = mk[j] * eh[j];
      fft.inverse(kxh.data(), kx.data());
      double resid = 0.0, pair_y = 0.0, ecur = 0.0;
      fft.inverse(eh.data(), buf.data());
      for (int j = 0; j < n; ++j) {
        resid = std::max(resid, std::abs(kx[j].real() - s * phi.values[j]));
        pair_y += y.values[j] * buf[j].real();
        ecur += wt[j] * std::norm(eh[j]);
      }
      *cfg.trace << iterations << ',' << (resid - quad * pair_y) << ','
                 << std::sqrt(grid.period * ecur) << ',' << s << '\n';
    }

    if (std::sqrt(dn2) / (1.0 + std::sqrt(xn2)) < cfg.tol) {
      converged = true;
      break;
    }
  }

  SolveReport rep;
  rep.iterations = iterations;
  rep.converged = converged;

  fft.inverse(eh.data(), buf.data());
  GridFunction e(grid);
  for (int j = 0; j < n; ++j) e.values[j] = buf[j].real();

  for (int j = 0; j < n; ++j) kxh[j] = mk[j] * eh[j];
  fft.inverse(kxh.data(), kx.data());
  double resid = 0.0;
  for (int j = 0; j < n; ++j)
    resid = std::max(resid, std::abs(kx[j].real() - s * phi.values[j]));

  double ht2 = 0.0;
  for (int j = 0; j < n; ++j) ht2 += wt[j] * std::norm(eh[j]);
  const double e_ht = std::sqrt(grid.period * ht2);

  rep.pair = ProbePair{std::move(e), s};
  rep.objective = resid - l2_inner(y, rep.pair.e);
  rep.minimizer_found = converged && s > cfg.s_floor * std::max(1.0, e_ht);
  return rep;
}

// Probe functional of a successful solve: e / s.
inline GridFunction recover_probe(const SolveReport& rep) {
  if (!rep.minimizer_found)
    throw std::invalid_argument("recover_probe: report carries no minimizer");
  GridFunction probe = rep.pair.e;
  for (auto& v : probe.values) v /= rep.pair.s;
  return probe;
}

// Power iteration on K* K over H^t x R; returns the operator norm estimate.
inline double estimate_operator_norm(const GridFunction& phi, const KernelSpec& ks,
                                     SobolevIndex t, int iters = 200) {
  ProbePair x{phi, 1.0};
  double sigma = 0.0;
  for (int i = 0; i < iters; ++i) {
    const double nrm = std::sqrt(sobolev_inner(x.e, x.e, t) + x.s * x.s);
    if (!(nrm > 0.0)) return 0.0;
    for (auto& v : x.e.values) v /= nrm;
    x.s /= nrm;
    const GridFunction kx = apply_K(x, phi, ks);
    x = apply_K_star(kx, phi, ks, t);
    sigma = std::sqrt(sobolev_inner(x.e, x.e, t) + x.s * x.s);
  }
  return std::sqrt(sigma);
}

}  // namespace invtest
