#pragma once

// Regularized hypothesis testing for a periodic deconvolution problem:
// spectral grid calculus, the convolution forward operator, scenario
// construction, white-noise sampling, test statistics and power formulas,
// the primal-dual solver for the probe functional, the two-sample adaptive
// test, and the experiment runner.

#include "invtest/adaptive.hpp"
#include "invtest/convolution.hpp"
#include "invtest/experiment.hpp"
#include "invtest/grid.hpp"
#include "invtest/noise.hpp"
#include "invtest/parallel.hpp"
#include "invtest/pdps.hpp"
#include "invtest/scenario.hpp"
#include "invtest/spectral.hpp"
#include "invtest/testing.hpp"
