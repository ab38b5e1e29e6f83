#include "cvqss/rates_finite.hpp"

#include "cvqss/rates_asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cvqss {

std::string gate_name(Gate g) {
  switch (g) {
    case Gate::Ok: return "ok";
    case Gate::BlockSize: return "block_size";
    case Gate::EnergyBound: return "energy_bound";
    case Gate::EpsilonMu: return "epsilon_mu";
    case Gate::Variance: return "variance";
  }
  return "unknown";
}

namespace {

// Radial function at xi = 1 from the Legendre expansion with k even terms.
double radial_s00(double c, int k) {
  Matd t = Matd::Zero(k, k);
  const double c2 = c * c;
  for (int i = 0; i < k; ++i) {
    const double r = 2.0 * i;
    t(i, i) = r * (r + 1.0) + c2 * (2.0 * r * (r + 1.0) - 1.0) / ((2.0 * r - 1.0) * (2.0 * r + 3.0));
    if (i + 1 < k) t(i, i + 1) = (r + 2.0) * (r + 1.0) * c2 / ((2.0 * r + 3.0) * (2.0 * r + 5.0));
    if (i > 0) t(i, i - 1) = r * (r - 1.0) * c2 / ((2.0 * r - 3.0) * (2.0 * r - 1.0));
  }
  Eigen::EigenSolver<Matd> es(t);
  Eigen::Index best = 0;
  es.eigenvalues().real().minCoeff(&best);
  const Vecd d = es.eigenvectors().col(best).real();
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < k; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    num += sign * d(i) * std::sph_bessel(static_cast<unsigned>(2 * i), c);
    den += d(i);
  }
  return num / den;
}

}  // namespace

double prolate_lambda0(double c) {
  if (!(c > 0.0 && c <= 0.5)) throw std::invalid_argument("prolate_lambda0: bandwidth outside (0, 0.5]");
  const double s = radial_s00(c, 12);
  const double s_check = radial_s00(c, 24);
  if (std::abs(s - s_check) > 1e-10 * std::abs(s_check))
    throw std::runtime_error("prolate_lambda0: Legendre series did not converge");
  return 2.0 * c / std::numbers::pi * s_check * s_check;
}

double q_constant(double delta_x, double delta_p) {
  if (!(delta_x > 0.0 && delta_p > 0.0)) throw std::invalid_argument("q_constant: resolutions must be positive");
  return -std::log2(prolate_lambda0(delta_x * delta_p / 4.0));
}

double gamma_fn(double d) {
  if (!(d >= 0.0)) throw std::invalid_argument("gamma_fn: argument must be non-negative");
  if (d < 1e-300) return 1.0;
  const double s = std::sqrt(1.0 + d * d);
  // d / (s - 1) rewritten as (s + 1) / d.
  return (d + s) * std::exp(d * std::log((s + 1.0) / d));
}

EnergyBound energy_gamma(double range_m, double t_e, double alpha) {
  if (!(t_e > 0.5 && t_e <= 1.0)) throw std::invalid_argument("energy_gamma: T_e must lie in (0.5, 1]");
  const double zeta = std::sqrt((1.0 - t_e) / (2.0 * t_e));
  const double lambda = std::pow((2.0 * t_e - 1.0) / t_e, 2);
  const double pre = 0.5 * (std::sqrt(1.0 + lambda) + std::sqrt(1.0 + 1.0 / lambda));
  const double gap = zeta * range_m - alpha;
  return {pre * std::exp(-gap * gap / (t_e * (1.0 + lambda) / 2.0)), zeta * range_m > alpha};
}

BlockSizes block_sizes(Protocol kind, double p, double m, int n) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("block_sizes: p must lie in (0,1)");
  if (!(m > 0.0)) throw std::invalid_argument("block_sizes: m must be positive");
  BlockSizes b;
  b.m = m;
  if (kind == Protocol::QSS) {
    b.l = m / std::pow(p, n + 1);
    b.t = (1.0 - p) * (1.0 - p) * b.l;
  } else {
    b.l = m / p;
    b.t = (1.0 - p) * b.l;
  }
  b.n = b.m + b.t;
  return b;
}

double solve_v(double eps_mu, double m, double t, double range_m, double a_bracket_sq) {
  if (!(a_bracket_sq > eps_mu && eps_mu > 0.0)) throw std::invalid_argument("solve_v: budget exhausted");
  const double n = m + t;
  return range_m * range_m * std::sqrt(n * (t + 1.0) / (2.0 * m * t * t) * std::log(2.0 / (a_bracket_sq - eps_mu)));
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

SlackResult statistical_slack_mu(const FiniteSizeParams& fs, const BlockSizes& b, const MomentEstimates& mom,
                                 double v) {
  SlackResult out;
  const double d0 = mom.expected_d;
  out.sigma_sq = b.t / b.n * (mom.v_d - b.t / b.n * d0 * d0) +
                 b.m / b.n * (mom.v_a_pe + mom.v_b_pe + 2.0 * v / (fs.delta_p * fs.delta_p));
  if (!(out.sigma_sq >= 0.0)) {
    out.gate = Gate::Variance;
    return out;
  }
  const double lg = std::log2(1.0 / fs.eps_mu);
  out.mu = std::sqrt(2.0 * lg) * b.n * std::sqrt(out.sigma_sq) / (b.t * std::sqrt(b.m)) +
           4.0 * (fs.range_m / fs.delta_p) * lg / 3.0 * b.n / (b.m * b.t);
  return out;
}

namespace {

FiniteResult assemble(Protocol kind, const FiniteSizeParams& fs, const FiniteInputs& in) {
  validate(fs);
  if (in.checks.empty()) throw std::invalid_argument("secret_fraction: at least one check pair is required");
  FiniteResult res;
  res.blocks = block_sizes(kind, fs.p, fs.m, fs.n);
  const BlockSizes& b = res.blocks;
  if (!(b.t >= 1.0)) {
    res.gate = Gate::BlockSize;
    return res;
  }
  const double gamma_e = energy_gamma(fs.range_m, fs.t_e, fs.alpha).value;
  const double bracket = fs.eps_s - fs.eps_1 - 2.0 * std::sqrt(2.0 * fs.m * gamma_e);
  if (!(bracket > 0.0)) {
    res.gate = Gate::EnergyBound;
    return res;
  }
  const double a_sq = bracket * bracket;
  if (!(a_sq > fs.eps_mu)) {
    res.gate = Gate::EpsilonMu;
    return res;
  }
  res.v = solve_v(fs.eps_mu, b.m, b.t, fs.range_m, a_sq);
  res.log_gamma = -std::numeric_limits<double>::infinity();
  for (const MomentEstimates& mom : in.checks) {
    const SlackResult s = statistical_slack_mu(fs, b, mom, res.v);
    if (s.gate != Gate::Ok) {
      res.gate = s.gate;
      return res;
    }
    const double lg = std::log2(gamma_fn(mom.expected_d + s.mu));
    if (lg > res.log_gamma) {
      res.log_gamma = lg;
      res.mu = s.mu;
    }
  }
  res.q = q_constant(fs.delta_x, fs.delta_p);
  res.leakage = ec_leakage(b.m, fs.beta, fs.delta_x, in.key.v_key, in.key.v_key_cond, fs.ec_delta_power);
  double ell = b.m * (res.q - res.log_gamma) - res.leakage - std::log2(1.0 / (fs.eps_c * fs.eps_1 * fs.eps_1)) + 2.0;
  if (kind == Protocol::QKD) ell = 0.5 * (ell - binary_entropy(fs.p) * b.l);
  res.ell = ell;
  res.rate = std::max(ell / b.l, 0.0);
  return res;
}

}  // namespace

FiniteResult secret_fraction_qss(const FiniteSizeParams& fs, const FiniteInputs& in) {
  return assemble(Protocol::QSS, fs, in);
}

FiniteResult secret_fraction_qkd(const FiniteSizeParams& fs, const FiniteInputs& in) {
  return assemble(Protocol::QKD, fs, in);
}

FiniteResult secret_fraction(Protocol kind, const FiniteSizeParams& fs, const FiniteInputs& in) {
  return assemble(kind, fs, in);
}

OptimizedFinite optimize_p(Protocol kind, const FiniteSizeParams& fs, const FiniteInputs& in, int grid_points,
                           double tol) {
  const double lo = 0.5;
  const double hi = 0.9999;
  auto eval = [&](double p) {
    FiniteSizeParams f = fs;
    f.p = p;
    return assemble(kind, f, in);
  };
  // Zero-floored rates are flat, so rank by the raw length per use.
  auto score = [&](double p) {
    const FiniteResult r = eval(p);
    return r.gate == Gate::Ok ? r.ell / r.blocks.l : -std::numeric_limits<double>::infinity();
  };
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<double> grid(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    grid[i] = lo + (hi - lo) * i / (grid_points - 1);
    const double s = score(grid[i]);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  const double a = grid[std::max(best - 1, 0)];
  const double b = grid[std::min(best + 1, grid_points - 1)];
  auto [p_best, s_best] = golden_max(score, a, b, tol);
  if (best_score > s_best) p_best = grid[best];
  return {eval(p_best), p_best};
}

FiniteInputs qss_inputs(const NetworkParams& net, const FiniteSizeParams& fs) {
  const CovMatrixd cm = experimental_cm(net).cm;
  FiniteInputs in;
  for (int partner : {kModeA, kModeC})
    in.checks.push_back(expected_moments(cm, {{partner, Quadrature::P}, {kModeB, Quadrature::X}}, fs));
  const int kb = quad_index(kModeB, Quadrature::P, 3, cm.ordering);
  in.key.v_key = cm.entries(kb, kb);
  const double i = mutual_info_homodyne(cm, {kModeB, Quadrature::P}, {{kModeA, Quadrature::X}, {kModeC, Quadrature::X}});
  in.key.v_key_cond = in.key.v_key / std::exp2(2.0 * i);
  return in;
}

FiniteInputs qkd_inputs(const NetworkParams& net, const FiniteSizeParams& fs) {
  const CovMatrixd cm = qkd_cm(net).cm;
  FiniteInputs in;
  in.checks.push_back(expected_moments(cm, {{0, Quadrature::P}, {1, Quadrature::P}}, fs));
  const int kb = quad_index(1, Quadrature::X, 2, cm.ordering);
  in.key.v_key = cm.entries(kb, kb);
  in.key.v_key_cond = condition_homodyne(cm, 0, Quadrature::X).entries(0, 0);
  return in;
}

FinitePoint finite_point(double distance_km, double r_max, const NetworkParams& base, const FiniteSizeParams& fs) {
  FinitePoint pt;
  pt.distance_km = distance_km;
  NetworkParams net = base;
  net.distance_km = {distance_km, distance_km, distance_km};
  net.t_e = fs.t_e;
  const auto t = net.transmissions();
  const OptimizedRate asym = kss_optimized(t, r_max, Dealer::Middle);
  pt.r = asym.r;
  pt.g = asym.g;
  net.r = asym.r;
  net.g = asym.g;
  pt.qss = optimize_p(Protocol::QSS, fs, qss_inputs(net, fs));
  NetworkParams link = net;
  link.r = r_max;
  link.g = 0.0;
  pt.qkd = optimize_p(Protocol::QKD, fs, qkd_inputs(link, fs));
  pt.plob_lossy = plob(plob_lossy_transmission(t[0], net.eta_f, net.eta_d, net.eta_es), 2);
  return pt;
}

}  // namespace cvqss
