#pragma once

// Protocol constants and expected parameter-estimation statistics shared by the
// estimation and finite-size modules.

namespace cvqss {

struct FiniteSizeParams {
  double eps_s = 1e-9;
  double eps_c = 1e-9;
  double eps_1 = 4e-11;
  double eps_mu = 4e-20;
  double delta_x = 0.1;
  double delta_p = 0.4;
  double range_m = 25.0;  // detector range M
  double alpha = 28.0;
  double t_e = 0.99;
  double beta = 0.98;
  double m = 1e12;  // key rounds
  double p = 0.9;   // key-basis probability
  int n = 2;        // players besides the dealer
  // Power of the key resolution inside the leakage logarithm (2: discrete entropy).
  int ec_delta_power = 2;
};

void validate(const FiniteSizeParams& fs);

// Second moments are raw (not central) and in bin-index units.
struct MomentEstimates {
  double expected_d = 0.0;
  double v_d = 0.0;
  double v_a_pe = 0.0;
  double v_b_pe = 0.0;
  double a = 0.0;
};

}  // namespace cvqss
