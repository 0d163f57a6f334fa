#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "invtest/adaptive.hpp"
#include "invtest/convolution.hpp"
#include "invtest/scenario.hpp"
#include "invtest/testing.hpp"

namespace invtest {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One row of a power-versus-noise-level sweep.
struct PowerRecord {
  ScenarioKind scenario;
  std::string test;
  double a;
  double l;
  double lambda;
  double t;
  double sigma;
  double power;
  double se;          // 0 for the closed-form tests
  int no_min_count;
};

struct ExperimentConfig {
  ScenarioKind scenario = ScenarioKind::CompatibleSmooth;
  double a = 2.0;
  double l = 5.0 / 128.0;
  double lambda = 1.0;
  double t = 0.51;
  double alpha = 0.1;
  double sigma_min = 1e-6;
  double sigma_max = 1.0;
  int sigma_points = 25;
  int samples = 100;                 // Monte-Carlo draws per sigma for the two-sample test
  std::vector<double> plugin_betas;  // optional Tikhonov-filtered probes
  std::uint64_t seed = 1;
  int grid_n = 1024;
  int threads = 0;                   // 0 = hardware concurrency
  PdpsConfig solver;
  bool debug_solver = false;
  std::string out_csv;
  std::string out_svg;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    if (!(sigma_min > 0.0)) throw ConfigError("sigma-min must be positive");
    if (!(sigma_max >= sigma_min)) throw ConfigError("sigma-max must be >= sigma-min");
    if (sigma_points < 1) throw ConfigError("sigma-points must be >= 1");
    if (samples < 1) throw ConfigError("samples must be >= 1");
    if (!(l > 0.0 && l < 1.0)) throw ConfigError("l must lie in (0,1)");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0,1]");
    if (!(a >= 0.5)) throw ConfigError("a must be >= 1/2");
    if (!(t >= 0.0)) throw ConfigError("t must be >= 0");
    if (grid_n < 4 || grid_n % 2 != 0) throw ConfigError("grid-n must be even and >= 4");
    for (double b : plugin_betas)
      if (!(b > 0.0)) throw ConfigError("plugin-betas must be positive");
    try {
      solver.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  // Noise levels, log-spaced and sorted descending.
  std::vector<double> sigma_grid() const {
    std::vector<double> grid(sigma_points);
    if (sigma_points == 1) {
      grid[0] = sigma_max;
      return grid;
    }
    const double lo = std::log(sigma_min), hi = std::log(sigma_max);
    for (int i = 0; i < sigma_points; ++i)
      grid[i] = std::exp(hi + (lo - hi) * i / (sigma_points - 1));
    return grid;
  }
};

namespace detail {

inline std::string format_g9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

inline std::string plugin_name(double beta) {
  return "plugin(beta=" + format_g9(beta) + ")";
}

}  // namespace detail

// Run the full sweep. For each noise level the closed-form tests (exact
// inversion probe, deep-solve probe on noiseless data, optional filtered
// probes) are evaluated at sigma/sqrt(2) -- they see one data sample where
// the two-sample test needs two -- and the two-sample test is estimated
// empirically at sigma. Deterministic for a fixed config and seed.
inline std::vector<PowerRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Scenario scen = make_scenario(cfg.scenario, cfg.a, cfg.l, cfg.lambda, SobolevIndex(cfg.t));
  const PeriodicGrid grid(cfg.grid_n);
  const KernelSpec ks = scen.kernel();
  const GridFunction phi = feature_functional(scen, grid);
  const GridFunction u = truth(scen, grid);
  const GridFunction ideal = forward(u, ks);
  const double q_alpha = std_normal_quantile(cfg.alpha);
  const double handicap = std::sqrt(0.5);  // single-sample tests run at sigma/sqrt(2)

  const GridFunction probe0 = unregularized_probe(phi, ks);
  const double j_unreg = j_functional(probe0, phi, ideal, ks);

  // One deep solve on noiseless data provides the reference probe for the
  // whole sigma sweep.
  PdpsConfig oracle_cfg = cfg.solver;
  oracle_cfg.max_iter = std::max(oracle_cfg.max_iter, 60000);
  const SolveReport oracle_rep = pdps_solve(ideal, phi, ks, SobolevIndex(0.0), oracle_cfg);
  GridFunction oracle_probe = oracle_rep.pair.e;
  if (oracle_rep.pair.s > 0.0)
    for (auto& v : oracle_probe.values) v /= oracle_rep.pair.s;
  const double j_oracle = j_functional(oracle_probe, phi, ideal, ks);

  std::vector<std::pair<std::string, double>> plugin_js;
  for (double beta : cfg.plugin_betas) {
    const GridFunction pb = plugin_probe(phi, ks, beta);
    plugin_js.emplace_back(detail::plugin_name(beta), j_functional(pb, phi, ideal, ks));
  }

  const std::vector<double> sigmas = cfg.sigma_grid();
  std::vector<PowerRecord> records;
  records.reserve(sigmas.size() * (3 + plugin_js.size()));

  PdpsConfig solver = cfg.solver;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    const double sigma = sigmas[i];
    const double sigma_one_sample = sigma * handicap;
    std::vector<PowerRecord> at_sigma;

    auto push_exact = [&](const std::string& name, double j) {
      const double power = std_normal_cdf(q_alpha - j / sigma_one_sample);
      at_sigma.push_back(PowerRecord{cfg.scenario, name, cfg.a, cfg.l, cfg.lambda, cfg.t,
                                     sigma, power, 0.0, 0});
    };
    push_exact("unregularized", j_unreg);
    push_exact("oracle", j_oracle);
    for (const auto& [name, j] : plugin_js) push_exact(name, j);

    const std::uint64_t stream_base = static_cast<std::uint64_t>(i) << 32;
    const PowerEstimate est = empirical_power(scen, grid, sigma, cfg.alpha, cfg.samples,
                                              solver, cfg.seed, stream_base, cfg.threads);
    at_sigma.push_back(PowerRecord{cfg.scenario, "adaptive", cfg.a, cfg.l, cfg.lambda, cfg.t,
                                   sigma, est.power, est.se, est.no_min_count});

    std::sort(at_sigma.begin(), at_sigma.end(),
              [](const PowerRecord& x, const PowerRecord& y) { return x.test < y.test; });
    for (auto& rec : at_sigma) records.push_back(std::move(rec));
  }
  return records;
}

// CSV emission: optional "# key=value" comment lines, a fixed header, one row
// per record with 9 significant digits.
inline void emit_csv(const std::vector<PowerRecord>& records, const std::string& path,
                     const std::vector<std::pair<std::string, std::string>>& comments = {}) {
  std::ofstream out(path);
  if (!out) throw IoError("emit_csv: cannot open " + path);
  for (const auto& [key, value] : comments) out << "# " << key << "=" << value << "\n";
  out << "scenario,test,a,l,lambda,t,sigma,power,se,no_min_count\n";
  for (const auto& r : records) {
    out << to_string(r.scenario) << ',' << r.test << ',' << detail::format_g9(r.a) << ','
        << detail::format_g9(r.l) << ',' << detail::format_g9(r.lambda) << ','
        << detail::format_g9(r.t) << ',' << detail::format_g9(r.sigma) << ','
        << detail::format_g9(r.power) << ',' << detail::format_g9(r.se) << ','
        << r.no_min_count << '\n';
  }
  if (!out.good()) throw IoError("emit_csv: write failed for " + path);
}

inline std::vector<PowerRecord> parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("parse_csv: cannot open " + path);
  std::vector<PowerRecord> records;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    // the test name may carry a comma inside "plugin(beta=...)": re-join
    while (fields.size() > 10) {
      fields[1] += "," + fields[2];
      fields.erase(fields.begin() + 2);
    }
    if (fields.size() != 10) throw IoError("parse_csv: malformed row in " + path);
    PowerRecord r;
    if (fields[0] == "s1") r.scenario = ScenarioKind::CompatibleSmooth;
    else if (fields[0] == "s2") r.scenario = ScenarioKind::CompatibleNonsmooth;
    else if (fields[0] == "s3") r.scenario = ScenarioKind::IncompatibleSmooth;
    else throw IoError("parse_csv: unknown scenario in " + path);
    r.test = fields[1];
    r.a = std::stod(fields[2]);
    r.l = std::stod(fields[3]);
    r.lambda = std::stod(fields[4]);
    r.t = std::stod(fields[5]);
    r.sigma = std::stod(fields[6]);
    r.power = std::stod(fields[7]);
    r.se = std::stod(fields[8]);
    r.no_min_count = std::stoi(fields[9]);
    records.push_back(std::move(r));
  }
  return records;
}

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

// Static SVG plot: power against log-scaled noise level, one polyline per
// test, horizontal reference line at the level alpha.
inline void emit_plot(const std::vector<PowerRecord>& records, const std::string& path,
                      double alpha = 0.1) {
  constexpr double kW = 640, kH = 480;
  constexpr double kLeft = 60, kRight = 160, kTop = 20, kBottom = 50;
  const double plot_w = kW - kLeft - kRight;
  const double plot_h = kH - kTop - kBottom;

  double lo = 1e-6, hi = 1.0;
  if (!records.empty()) {
    lo = hi = records.front().sigma;
    for (const auto& r : records) {
      lo = std::min(lo, r.sigma);
      hi = std::max(hi, r.sigma);
    }
    if (lo == hi) {
      lo *= 0.5;
      hi *= 2.0;
    }
  }
  const double llo = std::log10(lo), lhi = std::log10(hi);
  auto xmap = [&](double sigma) {
    return kLeft + (std::log10(sigma) - llo) / (lhi - llo) * plot_w;
  };
  auto ymap = [&](double p) { return kTop + (1.0 - p) * plot_h; };

  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& r : records) series[r.test].push_back({r.sigma, r.power});
  for (auto& [name, pts] : series)
    std::sort(pts.begin(), pts.end());

  static const char* kPalette[] = {"#0072bd", "#d95319", "#edb120", "#7e2f8e",
                                   "#77ac30", "#4dbeee", "#a2142f"};

  std::ofstream out(path);
  if (!out) throw IoError("emit_plot: cannot open " + path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << kW << "\" height=\"" << kH
      << "\" fill=\"white\"/>\n";
  // axes
  out << "<line x1=\"" << kLeft << "\" y1=\"" << ymap(0) << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << ymap(0) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << ymap(0) << "\" x2=\"" << kLeft << "\" y2=\""
      << ymap(1) << "\" stroke=\"black\"/>\n";
  // y ticks
  for (double p = 0.0; p <= 1.0 + 1e-12; p += 0.25) {
    out << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << ymap(p) << "\" x2=\"" << kLeft
        << "\" y2=\"" << ymap(p) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << ymap(p) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << detail::format_g9(p) << "</text>\n";
  }
  // x ticks at decades
  for (int d = static_cast<int>(std::ceil(llo)); d <= static_cast<int>(std::floor(lhi)); ++d) {
    const double x = kLeft + (d - llo) / (lhi - llo) * plot_w;
    out << "<line x1=\"" << x << "\" y1=\"" << ymap(0) << "\" x2=\"" << x << "\" y2=\""
        << ymap(0) + 4 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << ymap(0) + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">1e" << d << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kH - 12
      << "\" font-size=\"12\" text-anchor=\"middle\">noise level</text>\n";
  out << "<text x=\"16\" y=\"" << kTop + plot_h / 2
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kTop + plot_h / 2 << ")\">power</text>\n";
  // level reference
  out << "<line x1=\"" << kLeft << "\" y1=\"" << ymap(alpha) << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << ymap(alpha)
      << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";

  int color = 0;
  double legend_y = kTop + 10;
  for (const auto& [name, pts] : series) {
    const char* stroke = kPalette[color % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [sigma, power] : pts)
      out << xmap(sigma) << ',' << ymap(power) << ' ';
    out << "\"/>\n";
    out << "<line x1=\"" << kLeft + plot_w + 10 << "\" y1=\"" << legend_y << "\" x2=\""
        << kLeft + plot_w + 30 << "\" y2=\"" << legend_y << "\" stroke=\"" << stroke
        << "\" stroke-width=\"1.5\"/>\n";
    out << "<text x=\"" << kLeft + plot_w + 35 << "\" y=\"" << legend_y + 4
        << "\" font-size=\"11\">" << detail::xml_escape(name) << "</text>\n";
    legend_y += 16;
    ++color;
  }
  out << "</svg>\n";
  if (!out.good()) throw IoError("emit_plot: write failed for " + path);
}

}  // namespace invtest
