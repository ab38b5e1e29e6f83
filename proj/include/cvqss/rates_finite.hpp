#pragma once

// Composable finite-size secret fraction for the graph-state scheme and the
// bipartite benchmark.

#include "cvqss/estimation.hpp"
#include "cvqss/network.hpp"
#include "cvqss/params.hpp"

#include <string>
#include <vector>

namespace cvqss {

enum class Protocol { QSS, QKD };

// Reasons a finite-size evaluation returns zero.
enum class Gate {
  Ok,
  BlockSize,    // fewer than one expected check round per subset (t < 1)
  EnergyBound,  // eps_s - eps_1 - 2 sqrt(2 m Gamma) <= 0
  EpsilonMu,    // squared bracket does not exceed eps_mu
  Variance,     // sigma_*^2 < 0
};

std::string gate_name(Gate g);

struct BlockSizes {
  double l = 0.0;  // expected network uses
  double m = 0.0;  // key rounds
  double t = 0.0;  // check rounds per subset
  double n = 0.0;  // m + t
};

struct EnergyBound {
  double value = 0.0;
  // False when zeta*M <= alpha, where the exponent no longer decays in M.
  bool decaying = true;
};

double q_constant(double delta_x, double delta_p);
// Largest eigenvalue of the time-band limiting operator with bandwidth c.
double prolate_lambda0(double c);
double gamma_fn(double d);
EnergyBound energy_gamma(double range_m, double t_e, double alpha);
BlockSizes block_sizes(Protocol kind, double p, double m, int n = 2);
double solve_v(double eps_mu, double m, double t, double range_m, double a_bracket_sq);
double binary_entropy(double p);

struct SlackResult {
  double mu = 0.0;
  double sigma_sq = 0.0;
  Gate gate = Gate::Ok;
};

SlackResult statistical_slack_mu(const FiniteSizeParams& fs, const BlockSizes& blocks,
                                 const MomentEstimates& moments, double v);

struct KeyStats {
  double v_key = 1.0;
  double v_key_cond = 1.0;
};

struct FiniteInputs {
  std::vector<MomentEstimates> checks;  // one per untrusted singleton
  KeyStats key;
};

struct FiniteResult {
  double rate = 0.0;  // bits per network use, floored at zero
  Gate gate = Gate::Ok;
  double ell = 0.0;  // key length before flooring
  BlockSizes blocks;
  double v = 0.0;
  double mu = 0.0;
  double q = 0.0;
  double log_gamma = 0.0;
  double leakage = 0.0;
};

FiniteResult secret_fraction_qss(const FiniteSizeParams& fs, const FiniteInputs& in);
FiniteResult secret_fraction_qkd(const FiniteSizeParams& fs, const FiniteInputs& in);
FiniteResult secret_fraction(Protocol kind, const FiniteSizeParams& fs, const FiniteInputs& in);

struct OptimizedFinite {
  FiniteResult result;
  double p = 0.0;
};

// Coarse grid on [0.5, 0.9999] followed by golden-section refinement.
OptimizedFinite optimize_p(Protocol kind, const FiniteSizeParams& fs, const FiniteInputs& in,
                           int grid_points = 20, double tol = 1e-4);

// Scenario-level inputs. The graph-state inputs use the 13-mode model with the
// dealer in the middle; the benchmark uses the two-arm squeezed link.
FiniteInputs qss_inputs(const NetworkParams& net, const FiniteSizeParams& fs);
FiniteInputs qkd_inputs(const NetworkParams& net, const FiniteSizeParams& fs);

struct FinitePoint {
  double distance_km = 0.0;
  OptimizedFinite qss;
  OptimizedFinite qkd;
  double r = 0.0;  // graph-state initial squeezing
  double g = 0.0;
  double plob_lossy = 0.0;
};

// One distance: (r, g) from the asymptotic optimum at budget r_max, p optimised.
FinitePoint finite_point(double distance_km, double r_max, const NetworkParams& base, const FiniteSizeParams& fs);

}  // namespace cvqss
