#pragma once

// Asymptotic secret-sharing rates and bipartite benchmarks.

#include "cvqss/gaussian.hpp"
#include "cvqss/network.hpp"

#include <array>
#include <limits>
#include <string>
#include <vector>

namespace cvqss {

struct QuadSel {
  int mode = 0;
  Quadrature quad = Quadrature::X;
};

enum class Dealer { Middle, Edge };
enum class Strategy { HubOut, PlayerIn };
enum class BenchProtocol { SqueezedHomodyne, CoherentHeterodyne };

struct RateResult {
  double rate = 0.0;      // floored at zero
  double raw = 0.0;       // I - chi before flooring (and before any 1/n factor)
  double mutual_info = 0.0;
  double holevo = 0.0;
  std::string worst_subset;
  Dealer dealer = Dealer::Middle;
};

struct OptimizedRate {
  RateResult result;
  double r = 0.0;
  double g = 0.0;
};

// Returned when the key is perfectly determined by the guesses.
inline constexpr double kInfiniteRate = std::numeric_limits<double>::infinity();

double mutual_info_homodyne(const CovMatrixd& cm, QuadSel key, const std::vector<QuadSel>& guesses);

// Entropy difference S(dealer, trusted) - S(trusted | dealer key outcome), valid
// when the three-player state has a pure global extension.
double holevo_information(const CovMatrixd& players, QuadSel key, int trusted);

// Direct evaluation on an explicit purification: S(eve) - S(eve | key outcome),
// where eve holds every mode in eve_modes.
double holevo_explicit(const CovMatrixd& global, QuadSel key, const std::vector<int>& eve_modes);

RateResult kss_asymptotic(const CovMatrixd& players, Dealer dealer);

// Maximise K_SS over the initial squeezing r with the budget fully spent.
OptimizedRate kss_optimized(const std::array<double, 3>& t, double r_max, Dealer dealer,
                            Strategy strategy = Strategy::HubOut, double tol = 1e-4);

// Two-mode squeezed link with loss t_eff on the receiver, Alice's mode kept.
CovMatrixd benchmark_link_cm(double r, double t_eff);

RateResult bqss_rate(double r, double t_eff, BenchProtocol protocol, int n_players = 2);

double plob(double t_eff, int n_players = 2);
double plob_lossy_transmission(double t, double eta_f, double eta_d, double eta_s);

// Golden-section maximisation of a unimodal function on [lo, hi].
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol) {
  const double inv_phi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  double best_x = x;
  double best_f = f(x);
  for (double e : {lo, hi}) {
    const double fe = f(e);
    if (fe > best_f) {
      best_f = fe;
      best_x = e;
    }
  }
  return {best_x, best_f};
}

}  // namespace cvqss
