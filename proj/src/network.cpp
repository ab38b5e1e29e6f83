#include "cvqss/network.hpp"

#include <cmath>
#include <stdexcept>

namespace cvqss {

std::array<double, 3> NetworkParams::transmissions() const {
  return {distance_to_transmission(distance_km[0]), distance_to_transmission(distance_km[1]),
          distance_to_transmission(distance_km[2])};
}

NetworkParams NetworkParams::symmetric(double distance_km) {
  NetworkParams p;
  p.distance_km = {distance_km, distance_km, distance_km};
  return p;
}

void validate(const NetworkParams& p) {
  for (double d : p.distance_km)
    if (!(d >= 0.0)) throw std::invalid_argument("network: distance must be non-negative");
  if (!(p.xi >= 0.0)) throw std::invalid_argument("network: excess noise must be non-negative");
  for (double e : {p.eta_es, p.eta_f, p.eta_d, p.t_e})
    if (!(e > 0.0 && e <= 1.0)) throw std::invalid_argument("network: efficiencies must lie in (0,1]");
  if (!(p.r >= 0.0)) throw std::invalid_argument("network: squeezing must be non-negative");
  if (!(p.g >= 0.0)) throw std::invalid_argument("network: gate strength must be non-negative");
}

double distance_to_transmission(double d_km) {
  if (!(d_km >= 0.0)) throw std::invalid_argument("distance_to_transmission: negative distance");
  return std::pow(10.0, -0.02 * d_km);
}

namespace {

void check_transmissions(const std::array<double, 3>& t) {
  for (double x : t)
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("network: transmission must lie in [0,1]");
}

SymplecticOpd squeeze_layer(double r, int n) {
  SymplecticOpd op = identity_op(n);
  for (int m = 0; m < 3; ++m) op = compose(embed(squeezer(-r), {m}, n), op);
  return op;
}

ScenarioCM reduce(const CovMatrixd& global, double r, double g, const std::array<double, 3>& t,
                  Scenario s) {
  NetworkParams p;
  p.r = r;
  p.g = g;
  p.xi = 0.0;
  p.eta_es = p.eta_f = p.eta_d = p.t_e = 1.0;
  for (int i = 0; i < 3; ++i) p.distance_km[i] = t[i] > 0.0 ? -50.0 * std::log10(t[i]) : INFINITY;
  return {partial_trace(global, {0, 1, 2}), p, s};
}

}  // namespace

CovMatrixd hub_out_global(double r, double g, const std::array<double, 3>& t) {
  check_transmissions(t);
  const int n = 6;
  SymplecticOpd op = squeeze_layer(r, n);
  op = compose(embed(cz_gate(g), {0, 1}, n), op);
  op = compose(embed(cz_gate(g), {1, 2}, n), op);
  for (int m = 0; m < 3; ++m) op = compose(embed(beamsplitter(t[m]), {m, 3 + m}, n), op);
  return evolve(vacuum(n, {"A", "B", "C", "V_A", "V_B", "V_C"}), op);
}

CovMatrixd player_in_global(double r, double g, const std::array<double, 3>& t) {
  check_transmissions(t);
  const int n = 6;
  SymplecticOpd op = squeeze_layer(r, n);
  op = compose(embed(cz_gate(g), {0, 1}, n), op);
  op = compose(embed(beamsplitter(t[0]), {0, 3}, n), op);
  op = compose(embed(cz_gate(g), {1, 2}, n), op);
  op = compose(embed(beamsplitter(t[1]), {1, 4}, n), op);
  op = compose(embed(beamsplitter(t[2]), {2, 5}, n), op);
  return evolve(vacuum(n, {"A", "B", "C", "V_A", "V_B", "V_C"}), op);
}

ScenarioCM hub_out_cm(double r, double g, const std::array<double, 3>& t) {
  return reduce(hub_out_global(r, g, t), r, g, t, Scenario::HubOutIdeal);
}

ScenarioCM player_in_cm(double r, double g, const std::array<double, 3>& t) {
  return reduce(player_in_global(r, g, t), r, g, t, Scenario::PlayerInIdeal);
}

CovMatrixd experimental_global(const NetworkParams& p) {
  validate(p);
  const int n = 13;
  enum { A, B, C, Be, EA, EB, EC, V1, V2, V3, V4, V5, V6 };
  CovMatrixd cm = vacuum(n, {"A", "B", "C", "B_e", "E_A", "E_B", "E_C", "V_1", "V_2", "V_3", "V_4",
                             "V_5", "V_6"});
  for (int m : {EA, EB, EC}) cm.entries.block(2 * m, 2 * m, 2, 2) *= 1.0 + p.xi;
  const auto t = p.transmissions();
  SymplecticOpd op = squeeze_layer(p.r, n);
  op = compose(embed(cz_gate(p.g), {B, C}, n), op);
  op = compose(embed(cz_gate(p.g), {A, B}, n), op);
  op = compose(embed(beamsplitter(p.eta_c()), {A, V1}, n), op);
  op = compose(embed(beamsplitter(p.eta_c()), {B, V2}, n), op);
  op = compose(embed(beamsplitter(p.eta_c()), {C, V3}, n), op);
  op = compose(embed(beamsplitter(t[0]), {A, EA}, n), op);
  op = compose(embed(beamsplitter(t[1]), {B, EB}, n), op);
  op = compose(embed(beamsplitter(t[2]), {C, EC}, n), op);
  op = compose(embed(beamsplitter(p.t_e), {B, Be}, n), op);
  op = compose(embed(beamsplitter(p.eta_d), {A, V4}, n), op);
  op = compose(embed(beamsplitter(p.eta_d), {B, V5}, n), op);
  op = compose(embed(beamsplitter(p.eta_d), {C, V6}, n), op);
  return evolve(cm, op);
}

ScenarioCM experimental_cm(const NetworkParams& p) {
  return {partial_trace(experimental_global(p), {0, 1, 2}), p, Scenario::RealisticQSS};
}

Matd experimental_closed_form(const NetworkParams& p) {
  validate(p);
  const auto t = p.transmissions();
  const double e2 = std::exp(2.0 * p.r);
  const double em2 = std::exp(-2.0 * p.r);
  const double ec = p.eta_c();
  const double ed = p.eta_d;
  const double te = p.t_e;
  const double g = p.g;
  const double xi = p.xi;  // identical thermal channels on every link
  Matd m = Matd::Zero(6, 6);
  auto edge_x = [&](double tj) { return ed * (e2 * tj * ec - tj * (xi + ec) + xi) + 1.0; };
  auto edge_p = [&](double tj) { return tj * ed * (ec * (g * g * e2 + em2 - 1.0) - xi) + xi * ed + 1.0; };
  m(0, 0) = edge_x(t[0]);
  m(1, 1) = edge_p(t[0]);
  m(2, 2) = ed * te * (e2 * t[1] * ec - t[1] * (xi + ec) + xi) + 1.0;
  m(3, 3) = ed * te * (t[1] * ec * (2.0 * g * g * e2 + em2 - 1.0) + xi - xi * t[1]) + 1.0;
  m(4, 4) = edge_x(t[2]);
  m(5, 5) = edge_p(t[2]);
  const double cab = g * e2 * ec * ed * std::sqrt(te) * std::sqrt(t[0] * t[1]);
  const double cac = g * g * e2 * ec * ed * std::sqrt(t[0] * t[2]);
  const double cbc = g * e2 * ec * ed * std::sqrt(te) * std::sqrt(t[1] * t[2]);
  m(0, 3) = m(3, 0) = m(1, 2) = m(2, 1) = cab;
  m(1, 5) = m(5, 1) = cac;
  m(2, 5) = m(5, 2) = m(3, 4) = m(4, 3) = cbc;
  return m;
}

CovMatrixd qkd_global(const NetworkParams& p) {
  validate(p);
  const int n = 9;
  enum { A, B, Be, EA, EB, V1, V2, V3, V4 };
  CovMatrixd cm = vacuum(n, {"A", "B", "B_e", "E_A", "E_B", "V_1", "V_2", "V_3", "V_4"});
  for (int m : {EA, EB}) cm.entries.block(2 * m, 2 * m, 2, 2) *= 1.0 + p.xi;
  const auto t = p.transmissions();
  SymplecticOpd op = embed(squeezer(p.r), {A}, n);
  op = compose(embed(squeezer(-p.r), {B}, n), op);
  op = compose(embed(beamsplitter(0.5), {A, B}, n), op);
  // Alice keeps her mode and detects it directly; only escape loss applies.
  op = compose(embed(beamsplitter(p.eta_es), {A, V1}, n), op);
  op = compose(embed(beamsplitter(p.eta_c()), {B, V2}, n), op);
  op = compose(embed(beamsplitter(t[0]), {B, EA}, n), op);
  op = compose(embed(beamsplitter(t[1]), {B, EB}, n), op);
  op = compose(embed(beamsplitter(p.t_e), {B, Be}, n), op);
  op = compose(embed(beamsplitter(p.eta_d), {A, V4}, n), op);
  op = compose(embed(beamsplitter(p.eta_d), {B, V3}, n), op);
  return evolve(cm, op);
}

ScenarioCM qkd_cm(const NetworkParams& p) {
  return {partial_trace(qkd_global(p), {0, 1}), p, Scenario::RealisticQKD};
}

double inferred_squeezing(double measured_db, double eta_tot) {
  if (!(eta_tot > 0.0 && eta_tot <= 1.0))
    throw std::invalid_argument("inferred_squeezing: total efficiency must lie in (0,1]");
  const double vs = std::pow(10.0, -measured_db / 10.0);
  const double vr = (vs - (1.0 - eta_tot)) / eta_tot;
  if (!(vr > 0.0)) throw std::invalid_argument("inferred_squeezing: measured variance below the loss floor");
  return -0.5 * std::log(vr);
}

}  // namespace cvqss
