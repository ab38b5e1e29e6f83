#pragma once

// Symplectic evolutions and output covariance matrices for the bottleneck
// network scenarios and the bipartite benchmark link.

#include "cvqss/gaussian.hpp"

#include <array>

namespace cvqss {

struct NetworkParams {
  std::array<double, 3> distance_km{0.0, 0.0, 0.0};  // links to A, B, C
  double xi = 0.002;
  double eta_es = 0.99;
  double eta_f = 0.95;
  double eta_d = 0.99;
  double t_e = 0.99;
  double r = 0.0;
  double g = 0.0;

  double eta_c() const { return eta_es * eta_f; }
  std::array<double, 3> transmissions() const;
  static NetworkParams symmetric(double distance_km);
};

void validate(const NetworkParams& p);

enum class Scenario { HubOutIdeal, PlayerInIdeal, RealisticQSS, RealisticQKD };

struct ScenarioCM {
  CovMatrixd cm;
  NetworkParams params;
  Scenario scenario = Scenario::HubOutIdeal;
};

// Player mode indices in the three-player CMs.
inline constexpr int kModeA = 0;
inline constexpr int kModeB = 1;
inline constexpr int kModeC = 2;

double distance_to_transmission(double d_km);

// Pure six-mode states (A, B, C, V_A, V_B, V_C) before the loss ancillas are traced out.
CovMatrixd hub_out_global(double r, double g, const std::array<double, 3>& t);
CovMatrixd player_in_global(double r, double g, const std::array<double, 3>& t);

ScenarioCM hub_out_cm(double r, double g, const std::array<double, 3>& t);
ScenarioCM player_in_cm(double r, double g, const std::array<double, 3>& t);

// Full 13-mode output: A, B, C, B_e, E_A, E_B, E_C, V_1..V_6.
CovMatrixd experimental_global(const NetworkParams& p);
ScenarioCM experimental_cm(const NetworkParams& p);
// Entry-by-entry closed form of the three-player output.
Matd experimental_closed_form(const NetworkParams& p);

// Two-mode squeezed link through both arms: A (Alice, dealer partner) and B (dealer).
CovMatrixd qkd_global(const NetworkParams& p);
ScenarioCM qkd_cm(const NetworkParams& p);

double inferred_squeezing(double measured_db, double eta_tot);

}  // namespace cvqss
