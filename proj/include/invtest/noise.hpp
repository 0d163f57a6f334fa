#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "invtest/convolution.hpp"
#include "invtest/grid.hpp"

namespace invtest {

// Deterministic N(0,1) stream addressed by (seed, stream). Independent
// Monte-Carlo samples use distinct stream indices under one seed. The
// Box-Muller transform is spelled out so draws are identical across standard
// library implementations.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.141592653589793238462643383280 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  double uniform() {  // 53-bit mantissa in [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// One realization of discrete white noise together with its address.
struct NoiseDraw {
  GridFunction z;
  std::uint64_t seed;
  std::uint64_t stream;
};

// Entries are i.i.d. N(0, n/period). Under the (period/n)-weighted pairing
// this calibrates Var <Z, g> = ||g||^2 for every fixed g.
inline NoiseDraw sample_white_noise(const PeriodicGrid& grid, std::uint64_t seed,
                                    std::uint64_t stream) {
  GaussianStream gauss(seed, stream);
  const double sd = std::sqrt(static_cast<double>(grid.n) / grid.period);
  NoiseDraw draw{GridFunction(grid), seed, stream};
  for (auto& v : draw.z.values) v = sd * gauss.next();
  return draw;
}

// Data model: forward(u) + sigma * z.
inline GridFunction generate_data(const GridFunction& u, const KernelSpec& ks, double sigma,
                                  std::uint64_t seed, std::uint64_t stream) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("generate_data: sigma must be >= 0");
  GridFunction y = forward(u, ks);
  if (sigma > 0.0) {
    const NoiseDraw draw = sample_white_noise(u.grid, seed, stream);
    for (int j = 0; j < y.size(); ++j) y.values[j] += sigma * draw.z.values[j];
  }
  return y;
}

}  // namespace invtest
