#pragma once

// Seeded Monte Carlo sampler of homodyne outcomes, used as an independent check
// on the analytic conditioning and moment calculations.

#include "cvqss/estimation.hpp"
#include "cvqss/gaussian.hpp"
#include "cvqss/rates_asymptotic.hpp"

#include <cstdint>
#include <vector>

namespace cvqss {

struct SampleBatch {
  std::uint64_t seed = 0;
  long count = 0;
  Matd outcomes;  // count x (number of sampled quadratures)
};

// Samples are drawn in fixed-size chunks, each with its own derived seed, so the
// result does not depend on the number of workers.
SampleBatch sample_rounds(const CovMatrixd& cm, const std::vector<QuadSel>& assignment, long count,
                          std::uint64_t seed, int workers = 1);

struct EmpiricalMoments {
  MomentEstimates value;
  MomentEstimates std_error;
};

// Bins column `trusted` (after scaling by a) and column `partner` on the grid.
EmpiricalMoments empirical_moments(const SampleBatch& batch, int trusted, int partner, const BinGrid& grid,
                                   double a);

struct Regression {
  double slope = 0.0;
  double slope_se = 0.0;
  double residual_variance = 0.0;  // estimate of Var(y | x)
  double residual_variance_se = 0.0;
};

Regression regress(const SampleBatch& batch, int x_col, int y_col);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

inline constexpr long kSampleChunk = 1L << 16;

}  // namespace cvqss
