#include "cvqss/estimation.hpp"

#include "cvqss/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cvqss {

void validate(const FiniteSizeParams& fs) {
  for (double e : {fs.eps_s, fs.eps_c, fs.eps_1, fs.eps_mu})
    if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("finite-size: every epsilon must lie in (0,1)");
  if (!(fs.eps_1 < fs.eps_s)) throw std::invalid_argument("finite-size: eps_1 must be below eps_s");
  if (!(fs.delta_x > 0.0 && fs.delta_p > 0.0)) throw std::invalid_argument("finite-size: resolutions must be positive");
  if (!(fs.delta_x < 2.0 * fs.range_m && fs.delta_p < 2.0 * fs.range_m))
    throw std::invalid_argument("finite-size: resolution must be below the detector window 2M");
  if (!(fs.beta > 0.0 && fs.beta <= 1.0)) throw std::invalid_argument("finite-size: beta must lie in (0,1]");
  if (!(fs.m > 0.0)) throw std::invalid_argument("finite-size: m must be positive");
  if (!(fs.p > 0.0 && fs.p < 1.0)) throw std::invalid_argument("finite-size: p must lie in (0,1)");
  if (!(fs.t_e > 0.5 && fs.t_e <= 1.0)) throw std::invalid_argument("finite-size: T_e must lie in (0.5,1]");
  if (fs.n < 1) throw std::invalid_argument("finite-size: n must be positive");
  if (fs.ec_delta_power != 1 && fs.ec_delta_power != 2)
    throw std::invalid_argument("finite-size: ec_delta_power must be 1 or 2");
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

BinGrid make_grid(double delta, double range_m) {
  if (!(delta > 0.0 && range_m > 0.0)) throw std::invalid_argument("grid: resolution and range must be positive");
  const double ratio = 2.0 * range_m / delta;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * ratio || rounded < 2.0)
    throw std::invalid_argument("grid: 2M/delta must be an integer of at least 2");
  BinGrid g;
  g.delta = delta;
  g.range_m = range_m;
  g.count = static_cast<int>(rounded);
  g.edges.push_back(-std::numeric_limits<double>::infinity());
  for (int k = 1; k < g.count; ++k) g.edges.push_back(-range_m + k * delta);
  g.edges.push_back(std::numeric_limits<double>::infinity());
  return g;
}

int BinGrid::locate(double q) const {
  // Intervals are closed on the right.
  const double k = std::ceil((q + range_m) / delta);
  if (k <= 1.0) return 0;
  if (k >= count) return count - 1;
  return static_cast<int>(k) - 1;
}

double rescale_factor(const CovMatrixd& cm, QuadSel from, QuadSel to) {
  if (from.mode == to.mode) throw std::invalid_argument("rescale_factor: modes must differ");
  MeanVectord zero{Vecd::Zero(cm.entries.rows()), cm.ordering};
  const auto c = condition_homodyne_full(cm, zero, from.mode, from.quad, 1.0);
  const int mode_after = to.mode > from.mode ? to.mode - 1 : to.mode;
  return c.mean.entries(quad_index(mode_after, to.quad, cm.modes() - 1, cm.ordering));
}

double rescale_factor_closed_form(const NetworkParams& p) {
  const Matd m = experimental_closed_form(p);
  return m(1, 2) / m(1, 1);
}

CheckVariance conditional_check_variance(const NetworkParams& p) {
  CheckVariance out;
  const CovMatrixd cm = experimental_cm(p).cm;
  const CovMatrixd cond = condition_homodyne(cm, kModeB, Quadrature::X);
  out.schur = cond.entries(1, 1);
  const Matd m = experimental_closed_form(p);
  out.closed_form = m(1, 1) - m(1, 2) * m(1, 2) / m(2, 2);
  if (std::abs(out.schur - out.closed_form) > 1e-10 * std::max(1.0, std::abs(out.closed_form)))
    throw std::logic_error("conditional_check_variance: closed form and Schur complement disagree");
  return out;
}

std::vector<double> bin_probability_1d(const BinGrid& g, double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("bin_probability_1d: variance must be positive");
  const double s = std::sqrt(variance);
  std::vector<double> out(g.count);
  for (int k = 0; k < g.count; ++k) {
    const double lo = g.edges[k];
    const double hi = g.edges[k + 1];
    // Use the tail on the far side of zero to avoid cancellation.
    if (lo >= 0.0)
      out[k] = normal_cdf(-lo / s) - normal_cdf(-hi / s);
    else
      out[k] = normal_cdf(hi / s) - normal_cdf(lo / s);
  }
  return out;
}

Matd joint_bin_probability(const BinGrid& ga, const BinGrid& gb, const Bivariate& dist, double abs_tol) {
  const double det = dist.va * dist.vb - dist.cov * dist.cov;
  if (!(dist.va > 0.0 && dist.vb > 0.0 && det > 0.0))
    throw std::invalid_argument("joint_bin_probability: covariance must be positive definite");
  const double sa = std::sqrt(dist.va);
  const double slope = dist.cov / dist.va;
  const double sc = std::sqrt(det / dist.va);
  const int nb = gb.count;

  // Density of A at q times the conditional probability of every B bin.
  auto row_integrand = [&](double q) {
    Eigen::VectorXd out(nb);
    const double dens = std::exp(-0.5 * q * q / dist.va) / (sa * std::sqrt(2.0 * std::numbers::pi));
    const double mu = slope * q;
    double prev = 0.0;
    for (int k = 0; k < nb; ++k) {
      const double hi = gb.edges[k + 1];
      const double cdf = std::isinf(hi) ? 1.0 : normal_cdf((hi - mu) / sc);
      out(k) = dens * (cdf - prev);
      prev = cdf;
    }
    return out;
  };

  Matd prob(ga.count, nb);
  for (int j = 0; j < ga.count; ++j) {
    const double lo = ga.edges[j];
    const double hi = ga.edges[j + 1];
    Eigen::VectorXd row;
    if (std::isinf(lo) && std::isinf(hi)) {
      throw std::invalid_argument("joint_bin_probability: grid needs at least two bins");
    } else if (std::isinf(lo)) {
      // q = hi - (1-t)/t maps (0,1] onto (-inf, hi].
      row = integrate_adaptive(
          [&](double t) -> Eigen::VectorXd { return row_integrand(hi - (1.0 - t) / t) / (t * t); }, 0.0, 1.0,
          abs_tol);
    } else if (std::isinf(hi)) {
      row = integrate_adaptive(
          [&](double t) -> Eigen::VectorXd { return row_integrand(lo + (1.0 - t) / t) / (t * t); }, 0.0, 1.0,
          abs_tol);
    } else {
      row = integrate_adaptive(row_integrand, lo, hi, abs_tol);
    }
    prob.row(j) = row.transpose();
  }
  return prob;
}

MomentEstimates moments_from_probabilities(const Matd& prob, const BinGrid& ga, const BinGrid& gb) {
  MomentEstimates m;
  for (int j = 0; j < ga.count; ++j) {
    const double ij = ga.index(j);
    for (int k = 0; k < gb.count; ++k) {
      const double ik = gb.index(k);
      const double d = std::abs(ij - ik);
      const double pjk = prob(j, k);
      m.expected_d += d * pjk;
      m.v_d += d * d * pjk;
      m.v_a_pe += ij * ij * pjk;
      m.v_b_pe += ik * ik * pjk;
    }
  }
  return m;
}

MomentEstimates expected_moments(const CovMatrixd& cm, CheckPair pair, const FiniteSizeParams& fs) {
  const int n = cm.modes();
  const int it = quad_index(pair.trusted.mode, pair.trusted.quad, n, cm.ordering);
  const int ip = quad_index(pair.partner.mode, pair.partner.quad, n, cm.ordering);
  const double a = rescale_factor(cm, pair.trusted, pair.partner);
  const Bivariate dist{a * a * cm.entries(it, it), cm.entries(ip, ip), a * cm.entries(it, ip)};
  const BinGrid grid = make_grid(fs.delta_p, fs.range_m);
  MomentEstimates m = moments_from_probabilities(joint_bin_probability(grid, grid, dist), grid, grid);
  m.a = a;
  return m;
}

double ec_leakage(double m, double beta, double delta_key, double v_key, double v_key_cond, int delta_power) {
  if (!(v_key > 0.0 && v_key_cond > 0.0)) throw std::invalid_argument("ec_leakage: variances must be positive");
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("ec_leakage: beta must lie in (0,1]");
  if (!(delta_key > 0.0)) throw std::invalid_argument("ec_leakage: resolution must be positive");
  const double h_discrete = std::log2(2.0 * std::numbers::pi * std::numbers::e * v_key / std::pow(delta_key, delta_power));
  return 0.5 * m * (h_discrete - beta * std::log2(v_key / v_key_cond));
}

}  // namespace cvqss
