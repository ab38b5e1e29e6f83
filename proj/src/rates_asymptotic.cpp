#include "cvqss/rates_asymptotic.hpp"

#include "cvqss/graph_states.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cvqss {

namespace {

int index_of(const CovMatrixd& cm, QuadSel s) {
  if (s.mode < 0 || s.mode >= cm.modes()) throw std::invalid_argument("quadrature selection out of range");
  return quad_index(s.mode, s.quad, cm.modes(), cm.ordering);
}

std::string name_of(const CovMatrixd& cm, int mode) {
  return cm.labels.empty() ? "m" + std::to_string(mode) : cm.labels[mode];
}

}  // namespace

double mutual_info_homodyne(const CovMatrixd& cm, QuadSel key, const std::vector<QuadSel>& guesses) {
  const int k = index_of(cm, key);
  const double v = cm.entries(k, k);
  if (guesses.empty()) return 0.0;
  std::vector<int> g;
  for (QuadSel s : guesses) g.push_back(index_of(cm, s));
  const Matd b = select<double>(cm.entries, g, g);
  const Matd c = select<double>(cm.entries, {k}, g);
  const double v_cond = v - (c * pseudo_inverse<double>(b) * c.transpose())(0, 0);
  if (v_cond <= 1e-15 * v) return kInfiniteRate;
  return 0.5 * std::log2(v / v_cond);
}

double holevo_information(const CovMatrixd& players, QuadSel key, int trusted) {
  if (trusted == key.mode) throw std::invalid_argument("holevo_information: trusted mode equals dealer mode");
  std::vector<int> keep{key.mode, trusted};
  std::sort(keep.begin(), keep.end());
  const CovMatrixd pair = partial_trace(players, keep);
  const int dealer_pos = keep[0] == key.mode ? 0 : 1;
  const CovMatrixd cond = condition_homodyne(pair, dealer_pos, key.quad);
  return von_neumann_entropy(pair) - von_neumann_entropy(cond);
}

double holevo_explicit(const CovMatrixd& global, QuadSel key, const std::vector<int>& eve_modes) {
  std::vector<int> keep = eve_modes;
  keep.push_back(key.mode);
  std::sort(keep.begin(), keep.end());
  const CovMatrixd joint = partial_trace(global, keep);
  const int dealer_pos = static_cast<int>(std::find(keep.begin(), keep.end(), key.mode) - keep.begin());
  std::vector<int> eve_pos;
  for (int i = 0; i < static_cast<int>(keep.size()); ++i)
    if (i != dealer_pos) eve_pos.push_back(i);
  const CovMatrixd eve = partial_trace(joint, eve_pos);
  const CovMatrixd eve_cond = condition_homodyne(joint, dealer_pos, key.quad);
  return von_neumann_entropy(eve) - von_neumann_entropy(eve_cond);
}

RateResult kss_asymptotic(const CovMatrixd& players, Dealer dealer) {
  if (players.modes() != 3) throw std::invalid_argument("kss_asymptotic: three-player state required");
  RateResult res;
  res.dealer = dealer;
  QuadSel key;
  std::vector<QuadSel> guesses;
  std::array<std::pair<int, int>, 2> untrusted_trusted{};
  if (dealer == Dealer::Middle) {
    key = {kModeB, Quadrature::P};
    guesses = {{kModeA, Quadrature::X}, {kModeC, Quadrature::X}};
    untrusted_trusted = {{{kModeA, kModeC}, {kModeC, kModeA}}};
  } else {
    key = {kModeA, Quadrature::X};
    guesses = {{kModeB, Quadrature::P}, {kModeC, Quadrature::X}};
    untrusted_trusted = {{{kModeB, kModeC}, {kModeC, kModeB}}};
  }
  // A (2,2) scheme among the two non-dealer players has one authorised set.
  res.mutual_info = mutual_info_homodyne(players, key, guesses);
  res.holevo = -kInfiniteRate;
  for (auto [untrusted, trusted] : untrusted_trusted) {
    const double chi = holevo_information(players, key, trusted);
    if (chi > res.holevo) {
      res.holevo = chi;
      res.worst_subset = name_of(players, untrusted);
    }
  }
  res.raw = res.mutual_info - res.holevo;
  res.rate = std::max(res.raw, 0.0);
  return res;
}

OptimizedRate kss_optimized(const std::array<double, 3>& t, double r_max, Dealer dealer, Strategy strategy,
                            double tol) {
  const SqueezeBudget budget{r_max};
  auto eval = [&](double r) {
    const double g = budget_solve(r, budget);
    const ScenarioCM s = strategy == Strategy::HubOut ? hub_out_cm(r, g, t) : player_in_cm(r, g, t);
    return kss_asymptotic(s.cm, dealer);
  };
  auto [r_best, f_best] = golden_max([&](double r) { return eval(r).raw; }, 0.0, r_max, tol);
  (void)f_best;
  OptimizedRate out;
  out.r = r_best;
  out.g = budget_solve(r_best, budget);
  out.result = eval(r_best);
  return out;
}

CovMatrixd benchmark_link_cm(double r, double t_eff) {
  const int n = 3;
  SymplecticOpd op = embed(squeezer(r), {0}, n);
  op = compose(embed(squeezer(-r), {1}, n), op);
  op = compose(embed(beamsplitter(0.5), {0, 1}, n), op);
  op = compose(embed(beamsplitter(t_eff), {1, 2}, n), op);
  return partial_trace(evolve(vacuum(n, {"A", "B", "V"}), op), {0, 1});
}

RateResult bqss_rate(double r, double t_eff, BenchProtocol protocol, int n_players) {
  if (n_players < 1) throw std::invalid_argument("bqss_rate: player count must be positive");
  const CovMatrixd cm = benchmark_link_cm(r, t_eff);
  const double v_b = cm.entries(2, 2);
  RateResult res;
  if (protocol == BenchProtocol::SqueezedHomodyne) {
    res.mutual_info = mutual_info_homodyne(cm, {1, Quadrature::X}, {{0, Quadrature::X}});
  } else {
    const CovMatrixd cond = condition_heterodyne(cm, 0);
    res.mutual_info = 0.5 * std::log2(v_b / cond.entries(0, 0));
  }
  // Reverse reconciliation: the key is Bob's x outcome.
  res.holevo = von_neumann_entropy(cm) - von_neumann_entropy(condition_homodyne(cm, 1, Quadrature::X));
  res.raw = res.mutual_info - res.holevo;
  res.rate = std::max(res.raw, 0.0) / n_players;
  res.worst_subset = "E";
  return res;
}

double plob(double t_eff, int n_players) {
  if (!(t_eff >= 0.0 && t_eff <= 1.0)) throw std::invalid_argument("plob: transmission must lie in [0,1]");
  if (n_players < 1) throw std::invalid_argument("plob: player count must be positive");
  if (t_eff >= 1.0) return kInfiniteRate;
  return -std::log2(1.0 - t_eff) / n_players;
}

double plob_lossy_transmission(double t, double eta_f, double eta_d, double eta_s) {
  const double x = t * eta_d * eta_s;
  return eta_f * x * x;
}

}  // namespace cvqss
