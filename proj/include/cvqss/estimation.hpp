#pragma once

// Expected parameter-estimation statistics: binning, rescaling factor,
// conditional check variance, binned bivariate-normal probabilities, moments and
// reconciliation leakage.

#include "cvqss/gaussian.hpp"
#include "cvqss/network.hpp"
#include "cvqss/params.hpp"
#include "cvqss/rates_asymptotic.hpp"

#include <vector>

namespace cvqss {

struct BinGrid {
  double delta = 0.0;
  double range_m = 0.0;
  int count = 0;
  std::vector<double> edges;  // count + 1 entries, first and last infinite

  // Bin k has index k - (count-1)/2, i.e. its midpoint in units of delta.
  double index(int k) const { return k - 0.5 * (count - 1); }
  int locate(double q) const;
};

BinGrid make_grid(double delta, double range_m);

// Measuring `from` with outcome v shifts the mean of `to` by a*v.
double rescale_factor(const CovMatrixd& cm, QuadSel from, QuadSel to);

// a for the (p_A, x_B) check pair written with the closed-form output entries.
double rescale_factor_closed_form(const NetworkParams& p);

struct CheckVariance {
  double schur = 0.0;
  double closed_form = 0.0;
};

// V_{p_A | x_B} by Schur complement of the 13-mode output and by the closed-form
// entries; throws std::logic_error if the two disagree beyond 1e-10 (relative).
CheckVariance conditional_check_variance(const NetworkParams& p);

// Bivariate zero-mean normal with covariance [[va, cov], [cov, vb]].
struct Bivariate {
  double va = 1.0;
  double vb = 1.0;
  double cov = 0.0;
};

Matd joint_bin_probability(const BinGrid& ga, const BinGrid& gb, const Bivariate& dist, double abs_tol = 1e-9);

std::vector<double> bin_probability_1d(const BinGrid& g, double variance);

MomentEstimates moments_from_probabilities(const Matd& prob, const BinGrid& ga, const BinGrid& gb);

struct CheckPair {
  QuadSel trusted;  // party that rescales its outcomes (q = a * outcome)
  QuadSel partner;
};

// Expected moments of the rescaled check pair on the given state.
MomentEstimates expected_moments(const CovMatrixd& cm, CheckPair pair, const FiniteSizeParams& fs);

double ec_leakage(double m, double beta, double delta_key, double v_key, double v_key_cond,
                  int delta_power = 2);

double normal_cdf(double z);

}  // namespace cvqss
