#pragma once

#include <cmath>
#include <cstdint>

#include "invtest/grid.hpp"
#include "invtest/noise.hpp"

namespace test_helpers {

// Deterministic pseudo-random grid function with N(0,1) entries.
inline invtest::GridFunction random_function(const invtest::PeriodicGrid& grid,
                                             std::uint64_t stream) {
  invtest::GaussianStream gauss(0x1234abcdULL, stream);
  invtest::GridFunction f(grid);
  for (auto& v : f.values) v = gauss.next();
  return f;
}

inline double linf_distance(const invtest::GridFunction& f, const invtest::GridFunction& g) {
  double d = 0.0;
  for (int j = 0; j < f.size(); ++j)
    d = std::max(d, std::abs(f.values[j] - g.values[j]));
  return d;
}

}  // namespace test_helpers
