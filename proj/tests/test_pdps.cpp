#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "helpers.hpp"
#include "invtest/noise.hpp"
#include "invtest/pdps.hpp"
#include "invtest/scenario.hpp"
#include "invtest/spectral.hpp"
#include "invtest/testing.hpp"

using namespace invtest;
using test_helpers::linf_distance;
using test_helpers::random_function;

namespace {

const PeriodicGrid kGrid(1024);
const Scenario kS1 = make_scenario(ScenarioKind::CompatibleSmooth, 2.0);

// Bisection on the water-filling equation sum_i max(|v_i| - theta, 0) = radius.
std::vector<double> proj_l1_bisection(const std::vector<double>& v, double radius) {
  double l1 = 0.0, top = 0.0;
  for (double x : v) {
    l1 += std::abs(x);
    top = std::max(top, std::abs(x));
  }
  if (l1 <= radius) return v;
  double lo = 0.0, hi = top;
  for (int i = 0; i < 200; ++i) {
    const double theta = 0.5 * (lo + hi);
    double mass = 0.0;
    for (double x : v) mass += std::max(std::abs(x) - theta, 0.0);
    (mass > radius ? lo : hi) = theta;
  }
  const double theta = 0.5 * (lo + hi);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double mag = std::max(std::abs(v[i]) - theta, 0.0);
    out[i] = v[i] >= 0.0 ? mag : -mag;
  }
  return out;
}

ProbePair normalized_start(const GridFunction& phi, const KernelSpec& ks, SobolevIndex t) {
  GridFunction probe0 = unregularized_probe(phi, ks);
  const double nrm = sobolev_norm(probe0, t);
  for (auto& v : probe0.values) v /= nrm;
  return ProbePair{std::move(probe0), 1.0 / nrm};
}

}  // namespace

TEST_CASE("surrogate_objective") {
  const KernelSpec ks = kS1.kernel();
  const GridFunction phi = feature_functional(kS1, kGrid);
  const GridFunction ideal = forward(truth(kS1, kGrid), ks);

  SECTION("zero primal part leaves the scaled functional norm") {
    const ProbePair p{GridFunction(kGrid), 2.5};
    CHECK(surrogate_objective(p, phi, ideal, ks) ==
          Catch::Approx(2.5 * max_norm(phi)).margin(1e-12));
  }

  SECTION("positive homogeneity") {
    const GridFunction e = random_function(kGrid, 1);
    const GridFunction y = random_function(kGrid, 2);
    const double base = surrogate_objective(ProbePair{e, 0.7}, phi, y, ks);
    for (double lam : {0.5, 2.0, 10.0}) {
      GridFunction le = e;
      for (auto& v : le.values) v *= lam;
      CHECK(surrogate_objective(ProbePair{std::move(le), lam * 0.7}, phi, y, ks) ==
            Catch::Approx(lam * base).margin(1e-12 * std::max(1.0, lam)));
    }
  }

  SECTION("normalized exact-inversion start is already negative on ideal data") {
    const ProbePair start = normalized_start(phi, ks, SobolevIndex(0.51));
    CHECK(surrogate_objective(start, phi, ideal, ks) < 0.0);
  }
}

TEST_CASE("apply_K and its adjoint") {
  const KernelSpec ks = kS1.kernel();
  const GridFunction phi = feature_functional(kS1, kGrid);

  SECTION("blocks") {
    const GridFunction e = random_function(kGrid, 3);
    CHECK(linf_distance(apply_K(ProbePair{e, 0.0}, phi, ks), adjoint(e, ks)) == 0.0);
    const GridFunction me = apply_K(ProbePair{GridFunction(kGrid), 1.5}, phi, ks);
    for (int j = 0; j < kGrid.n; ++j)
      CHECK(me.values[j] == Catch::Approx(-1.5 * phi.values[j]).margin(1e-15));

    const ProbePair zero = apply_K_star(GridFunction(kGrid), phi, ks, SobolevIndex(0.51));
    CHECK(max_norm(zero.e) == 0.0);
    CHECK(zero.s == 0.0);

    const GridFunction r = random_function(kGrid, 4);
    const ProbePair flat = apply_K_star(r, phi, ks, SobolevIndex(0.0));
    CHECK(linf_distance(flat.e, forward(r, ks)) < 1e-12);
  }

  SECTION("pairing identity over random triples") {
    for (double t : {0.0, 0.51, 1.0}) {
      for (std::uint64_t i = 0; i < 100; ++i) {
        const GridFunction e = random_function(kGrid, 3 * i);
        const double s = (i % 5 == 0) ? 0.0 : std::cos(static_cast<double>(i));
        const GridFunction r = random_function(kGrid, 3 * i + 1);
        const double lhs = l2_inner(apply_K(ProbePair{e, s}, phi, ks), r);
        const ProbePair kr = apply_K_star(r, phi, ks, SobolevIndex(t));
        const double rhs = sobolev_inner(e, kr.e, SobolevIndex(t)) + s * kr.s;
        CHECK(std::abs(lhs - rhs) < 1e-8);
      }
    }
  }
}

TEST_CASE("proj_l1_ball") {
  SECTION("inside the ball: unchanged") {
    const std::vector<double> v{0.5, -0.25};
    CHECK(proj_l1_ball(v, 1.0) == v);
  }

  SECTION("single coordinate") {
    const std::vector<double> got = proj_l1_ball({3.0, 0.0}, 1.0);
    CHECK(got[0] == Catch::Approx(1.0).margin(1e-14));
    CHECK(got[1] == 0.0);
  }

  SECTION("water filling drops the smaller coordinate") {
    const std::vector<double> got = proj_l1_ball({2.0, 1.0}, 1.0);
    CHECK(got[0] == Catch::Approx(1.0).margin(1e-14));
    CHECK(got[1] == Catch::Approx(0.0).margin(1e-14));
  }

  SECTION("agrees with the bisection oracle and is feasible, idempotent, nonexpansive") {
    GaussianStream gauss(99, 0);
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 1 + trial % 40;
      std::vector<double> v(n), w(n);
      for (int i = 0; i < n; ++i) {
        v[i] = 3.0 * gauss.next();
        w[i] = 3.0 * gauss.next();
      }
      const double radius = 0.1 + std::abs(gauss.next());
      const std::vector<double> pv = proj_l1_ball(v, radius);
      const std::vector<double> oracle = proj_l1_bisection(v, radius);
      double l1 = 0.0;
      for (int i = 0; i < n; ++i) {
        CHECK(std::abs(pv[i] - oracle[i]) < 1e-10);
        l1 += std::abs(pv[i]);
      }
      CHECK(l1 <= radius + 1e-10);
      const std::vector<double> again = proj_l1_ball(pv, radius);
      for (int i = 0; i < n; ++i) CHECK(std::abs(again[i] - pv[i]) < 1e-12);

      const std::vector<double> pw = proj_l1_ball(w, radius);
      double d_in = 0.0, d_out = 0.0;
      for (int i = 0; i < n; ++i) {
        d_in += (v[i] - w[i]) * (v[i] - w[i]);
        d_out += (pv[i] - pw[i]) * (pv[i] - pw[i]);
      }
      CHECK(d_out <= d_in + 1e-12);
    }
  }

  CHECK_THROWS_AS(proj_l1_ball({1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("prox_F") {
  const SobolevIndex t(0.51);

  SECTION("no shift and feasible point: identity up to the s clip") {
    GridFunction e = random_function(kGrid, 7);
    const double nrm = sobolev_norm(e, t);
    for (auto& v : e.values) v /= 2.0 * nrm;  // strictly inside the ball
    const ProbePair out = prox_F(ProbePair{e, 0.4}, GridFunction(kGrid), 0.25, t);
    CHECK(linf_distance(out.e, e) < 1e-12);
    CHECK(out.s == 0.4);

    const ProbePair clipped = prox_F(ProbePair{e, -1.0}, GridFunction(kGrid), 0.25, t);
    CHECK(clipped.s == 0.0);
  }

  SECTION("radial projection lands exactly on the sphere") {
    GridFunction e = random_function(kGrid, 8);
    GridFunction y = random_function(kGrid, 9);
    const double tau = 0.25;
    GridFunction shifted = e;
    const GridFunction ry = riesz_map(y, t);
    for (int j = 0; j < kGrid.n; ++j) shifted.values[j] += tau * ry.values[j];
    const double scale = 2.0 / sobolev_norm(shifted, t);
    for (auto& v : e.values) v *= scale;
    for (auto& v : y.values) v *= scale;
    const ProbePair out = prox_F(ProbePair{e, 1.0}, y, tau, t);
    CHECK(sobolev_norm(out.e, t) == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("pdps_solve on ideal data") {
  const KernelSpec ks = kS1.kernel();
  const GridFunction phi = feature_functional(kS1, kGrid);
  const GridFunction ideal = forward(truth(kS1, kGrid), ks);
  const SobolevIndex t(0.51);
  PdpsConfig cfg;

  const SolveReport rep = pdps_solve(ideal, phi, ks, t, cfg);
  CHECK(rep.converged);
  CHECK(rep.minimizer_found);
  CHECK(rep.objective < 0.0);
  CHECK(rep.pair.s > 0.0);
  const double e_norm = sobolev_norm(rep.pair.e, t);
  CHECK(e_norm <= 1.0 + 1e-9);
  CHECK(e_norm >= 1.0 - 1e-6);

  SECTION("the returned objective matches the public evaluation") {
    CHECK(rep.objective ==
          Catch::Approx(surrogate_objective(rep.pair, phi, ideal, ks, t)).margin(1e-10));
  }

  SECTION("no worse than the starting point") {
    const ProbePair start = normalized_start(phi, ks, t);
    CHECK(rep.objective <= surrogate_objective(start, phi, ideal, ks, t) + 1e-8);
  }

  SECTION("recovered probe beats the exact-inversion probe") {
    const GridFunction probe = recover_probe(rep);
    const GridFunction probe0 = unregularized_probe(phi, ks);
    const double j = j_functional(probe, phi, ideal, ks, t);
    CHECK(j < 0.0);
    CHECK(j <= j_functional(probe0, phi, ideal, ks, t) + 1e-6);
  }
}

TEST_CASE("pdps_solve branch reporting") {
  const KernelSpec ks = kS1.kernel();
  const GridFunction phi = feature_functional(kS1, kGrid);

  SECTION("flat data cannot certify a negative value") {
    PdpsConfig cfg;
    const SolveReport rep = pdps_solve(GridFunction(kGrid), phi, ks, SobolevIndex(0.51), cfg);
    if (rep.minimizer_found) CHECK(rep.objective >= -1e-6);
    CHECK(sobolev_norm(rep.pair.e, SobolevIndex(0.51)) <= 1.0 + 1e-9);
    CHECK(rep.pair.s >= 0.0);
  }

  SECTION("an exhausted iteration budget is not convergence") {
    PdpsConfig cfg;
    cfg.max_iter = 3;
    const GridFunction ideal = forward(truth(kS1, kGrid), ks);
    const SolveReport rep = pdps_solve(ideal, phi, ks, SobolevIndex(0.51), cfg);
    CHECK_FALSE(rep.converged);
    CHECK_FALSE(rep.minimizer_found);
    CHECK(rep.iterations == 3);
    CHECK_THROWS_AS(recover_probe(rep), std::invalid_argument);
  }

  SECTION("config validation") {
    PdpsConfig bad;
    bad.tau = bad.rho = 0.6;  // 0.6*0.6*4 > 1
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    PdpsConfig neg;
    neg.tol = 0.0;
    CHECK_THROWS_AS(neg.validate(), std::invalid_argument);
  }

  SECTION("trace stream emits one row per iteration") {
    PdpsConfig cfg;
    cfg.max_iter = 5;
    cfg.trace = nullptr;
    std::ostringstream log;
    cfg.trace = &log;
    const GridFunction ideal = forward(truth(kS1, kGrid), ks);
    pdps_solve(ideal, phi, ks, SobolevIndex(0.51), cfg);
    int lines = 0;
    for (char c : log.str())
      if (c == '\n') ++lines;
    CHECK(lines == 6);  // header + 5 iterations
    CHECK(log.str().rfind("iteration,objective,e_norm,s", 0) == 0);
  }
}

TEST_CASE("recover_probe identities") {
  const GridFunction e = random_function(kGrid, 21);

  SolveReport rep;
  rep.pair = ProbePair{e, 1.0};
  rep.converged = rep.minimizer_found = true;
  CHECK(linf_distance(recover_probe(rep), e) == 0.0);

  SolveReport scaled = rep;
  for (auto& v : scaled.pair.e.values) v *= 7.0;
  scaled.pair.s = 7.0;
  CHECK(linf_distance(recover_probe(scaled), recover_probe(rep)) < 1e-12);
}

TEST_CASE("objective ratio identity") {
  const KernelSpec ks = kS1.kernel();
  const GridFunction phi = feature_functional(kS1, kGrid);
  const GridFunction y = random_function(kGrid, 30);
  const SobolevIndex t(0.51);
  for (std::uint64_t i = 0; i < 5; ++i) {
    const GridFunction probe = random_function(kGrid, 40 + i);
    const double nrm = sobolev_norm(probe, t);
    GridFunction unit = probe;
    for (auto& v : unit.values) v /= nrm;
    const double j = j_functional(probe, phi, y, ks, t);
    const double jhat = surrogate_objective(ProbePair{std::move(unit), 1.0 / nrm}, phi, y, ks, t);
    CHECK(j == Catch::Approx(jhat).margin(1e-10));
  }
}

TEST_CASE("operator norm bound") {
  for (double a : {2.0, 4.0}) {
    for (auto kind : {ScenarioKind::CompatibleSmooth, ScenarioKind::IncompatibleSmooth}) {
      const Scenario s = make_scenario(kind, a);
      const GridFunction phi = feature_functional(s, kGrid);
      for (double t : {0.0, 0.51, 1.0}) {
        const double nrm = estimate_operator_norm(phi, s.kernel(), SobolevIndex(t), 60);
        CHECK(nrm <= 2.0 + 1e-6);
        CHECK(nrm > 0.5);
      }
    }
  }
}
