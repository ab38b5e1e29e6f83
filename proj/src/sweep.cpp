#include "cvqss/sweep.hpp"

#include "cvqss/estimation.hpp"
#include "cvqss/graph_states.hpp"
#include "cvqss/mc_oracle.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace cvqss {

using nlohmann::json;

std::vector<double> Axis::samples() const {
  std::vector<double> out;
  if (stop < start) return out;
  const long n = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (long i = 0; i < n; ++i) out.push_back(start + i * step);
  return out;
}

Benchmark parse_benchmark(const std::string& name) {
  if (name == "plob") return Benchmark::Plob;
  if (name == "squeezed") return Benchmark::Squeezed;
  if (name == "coherent") return Benchmark::Coherent;
  throw ConfigError("benchmark: expected plob, squeezed or coherent, got '" + name + "'");
}

std::string benchmark_name(Benchmark b) {
  switch (b) {
    case Benchmark::Plob: return "plob";
    case Benchmark::Squeezed: return "squeezed";
    case Benchmark::Coherent: return "coherent";
  }
  return "unknown";
}

int worker_count() {
  const char* env = std::getenv(kWorkersEnv);
  if (env == nullptr || *env == '\0') return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  char* end = nullptr;
  const long w = std::strtol(env, &end, 10);
  if (*end != '\0' || w < 1 || w > 1024)
    throw ConfigError(std::string(kWorkersEnv) + ": expected an integer in [1, 1024]");
  return static_cast<int>(w);
}

namespace {

// Reads the members of one JSON object, rejecting anything not consumed.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where("") + "expected an object");
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where(key) + "wrong type (" + e.what() + ")");
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& at(const std::string& key) const { return j_.at(key); }
  std::string where(const std::string& key) const {
    std::string p = path_;
    if (!key.empty()) p += (p.empty() ? "" : ".") + key;
    return (p.empty() ? std::string("config") : p) + ": ";
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(where(it.key()) + "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_axis(ObjectReader& parent, const std::string& key, Axis& axis) {
  if (!parent.has(key)) return;
  ObjectReader r(parent.at(key), key);
  r.get("start", axis.start);
  r.get("stop", axis.stop);
  r.get("step", axis.step);
  r.finish();
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

void validate(const RunConfig& cfg) {
  require(cfg.schema_version == kSchemaVersion,
          "schema_version: unsupported version " + std::to_string(cfg.schema_version));
  require(cfg.budget_db > 0.0 && cfg.budget_db <= 40.0, "budget_db: must lie in (0, 40]");
  require(cfg.finite_budget_r > 0.0 && cfg.finite_budget_r <= 4.6, "finite_budget_r: must lie in (0, 4.6]");
  require(cfg.benchmark_db >= 0.0 && cfg.benchmark_db <= 40.0, "benchmark_db: must lie in [0, 40]");
  for (const auto& [name, ax] : {std::pair<std::string, const Axis&>{"distance_km", cfg.distance_km},
                                 std::pair<std::string, const Axis&>{"squeezing_db", cfg.squeezing_db}})
    require(ax.step > 0.0 && std::isfinite(ax.start) && std::isfinite(ax.stop),
            name + ": step must be positive and bounds finite");
  require(cfg.distance_km.start >= 0.0, "distance_km.start: must be non-negative");
  require(cfg.squeezing_db.start > 0.0, "squeezing_db.start: must be positive");
  require(cfg.bisection_tol_km > 0.0, "bisection_tol_km: must be positive");
  require(cfg.bracket_points >= 2, "bracket_points: must be at least 2");
  require(cfg.optimizer_tol > 0.0 && cfg.optimizer_tol < 1.0, "optimizer_tol: must lie in (0, 1)");
  require(cfg.mc_samples >= 3, "mc_samples: must be at least 3");
  require(cfg.mc_scenarios >= 1, "mc_scenarios: must be at least 1");
  for (double m : cfg.block_sizes) require(m >= 1.0, "block_sizes: every entry must be at least 1");
  try {
    validate(cfg.network);
    validate(cfg.finite);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON (") + e.what() + ")");
  }
  RunConfig cfg;
  ObjectReader root(j, "");
  if (!root.has("schema_version")) throw ConfigError("schema_version: required");
  root.get("schema_version", cfg.schema_version);
  if (cfg.schema_version != kSchemaVersion)
    throw ConfigError("schema_version: unsupported version " + std::to_string(cfg.schema_version));

  if (root.has("network")) {
    ObjectReader r(root.at("network"), "network");
    r.get("xi", cfg.network.xi);
    r.get("eta_es", cfg.network.eta_es);
    r.get("eta_f", cfg.network.eta_f);
    r.get("eta_d", cfg.network.eta_d);
    r.get("t_e", cfg.network.t_e);
    r.finish();
  }
  if (root.has("finite_size")) {
    ObjectReader r(root.at("finite_size"), "finite_size");
    FiniteSizeParams& f = cfg.finite;
    r.get("eps_s", f.eps_s);
    r.get("eps_c", f.eps_c);
    r.get("eps_1", f.eps_1);
    r.get("eps_mu", f.eps_mu);
    r.get("delta_x", f.delta_x);
    r.get("delta_p", f.delta_p);
    r.get("range_m", f.range_m);
    r.get("alpha", f.alpha);
    r.get("t_e", f.t_e);
    r.get("beta", f.beta);
    r.get("p", f.p);
    r.get("n", f.n);
    r.get("ec_delta_power", f.ec_delta_power);
    r.finish();
  }
  root.get("budget_db", cfg.budget_db);
  cfg.benchmark_db = cfg.budget_db;
  root.get("benchmark_db", cfg.benchmark_db);
  root.get("finite_budget_r", cfg.finite_budget_r);
  std::string s;
  if (root.has("dealer")) {
    root.get("dealer", s);
    if (s == "middle") cfg.dealer = Dealer::Middle;
    else if (s == "edge") cfg.dealer = Dealer::Edge;
    else throw ConfigError("dealer: expected middle or edge");
  }
  if (root.has("strategy")) {
    root.get("strategy", s);
    if (s == "hub_out") cfg.strategy = Strategy::HubOut;
    else if (s == "player_in") cfg.strategy = Strategy::PlayerIn;
    else throw ConfigError("strategy: expected hub_out or player_in");
  }
  if (root.has("benchmark")) {
    root.get("benchmark", s);
    cfg.benchmark = parse_benchmark(s);
  }
  read_axis(root, "distance_km", cfg.distance_km);
  read_axis(root, "squeezing_db", cfg.squeezing_db);
  root.get("block_sizes", cfg.block_sizes);
  root.get("bisection_tol_km", cfg.bisection_tol_km);
  root.get("bracket_points", cfg.bracket_points);
  root.get("optimizer_tol", cfg.optimizer_tol);
  root.get("mc_samples", cfg.mc_samples);
  root.get("mc_scenarios", cfg.mc_scenarios);
  root.get("seed", cfg.seed);
  root.get("output", cfg.output);
  root.finish();
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

double kss_at(double distance_km, double r_max, const RunConfig& cfg) {
  const auto t = NetworkParams::symmetric(distance_km).transmissions();
  return kss_optimized(t, r_max, cfg.dealer, cfg.strategy, cfg.optimizer_tol).result.rate;
}

double benchmark_rate(Benchmark b, double distance_km, double benchmark_r) {
  // The bipartite link spans two network links.
  const double t = distance_to_transmission(distance_km);
  const double t_eff = t * t;
  switch (b) {
    case Benchmark::Plob: return plob(t_eff, 2);
    case Benchmark::Squeezed: return bqss_rate(benchmark_r, t_eff, BenchProtocol::SqueezedHomodyne, 2).rate;
    case Benchmark::Coherent: return bqss_rate(benchmark_r, t_eff, BenchProtocol::CoherentHeterodyne, 2).rate;
  }
  return 0.0;
}

AsymptoticPoint asymptotic_point(double distance_km, const RunConfig& cfg) {
  AsymptoticPoint pt;
  pt.distance_km = distance_km;
  const double r_max = db_to_r(cfg.budget_db);
  const double r_bench = db_to_r(cfg.benchmark_db);
  const auto t = NetworkParams::symmetric(distance_km).transmissions();
  const OptimizedRate mid = kss_optimized(t, r_max, Dealer::Middle, cfg.strategy, cfg.optimizer_tol);
  const OptimizedRate edge = kss_optimized(t, r_max, Dealer::Edge, cfg.strategy, cfg.optimizer_tol);
  pt.kss_middle = mid.result.rate;
  pt.kss_edge = edge.result.rate;
  pt.r_middle = mid.r;
  pt.g_middle = mid.g;
  pt.bqss_squeezed = benchmark_rate(Benchmark::Squeezed, distance_km, r_bench);
  pt.bqss_coherent = benchmark_rate(Benchmark::Coherent, distance_km, r_bench);
  pt.plob = benchmark_rate(Benchmark::Plob, distance_km, r_bench);
  return pt;
}

std::vector<AsymptoticPoint> run_asymptotic_curve(const RunConfig& cfg, int workers) {
  const std::vector<double> ds = cfg.distance_km.samples();
  return parallel_map(ds.size(), workers, [&](std::size_t i) { return asymptotic_point(ds[i], cfg); });
}

std::vector<FiniteCurvePoint> run_finite_curve(const RunConfig& cfg, int workers) {
  const std::vector<double> ds = cfg.distance_km.samples();
  const std::size_t nd = ds.size();
  return parallel_map(nd * cfg.block_sizes.size(), workers, [&](std::size_t i) {
    FiniteSizeParams fs = cfg.finite;
    fs.m = cfg.block_sizes[i / nd];
    return FiniteCurvePoint{fs.m, finite_point(ds[i % nd], cfg.finite_budget_r, cfg.network, fs)};
  });
}

namespace {

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void schema_line(std::ostream& os, const char* table) {
  os << "# cvqss " << table << " schema " << kSchemaVersion << "\n";
}

}  // namespace

void write_asymptotic_csv(std::ostream& os, const std::vector<AsymptoticPoint>& pts) {
  schema_line(os, "rates-asymptotic");
  os << "distance_km,kss_middle_bits_per_use,kss_edge_bits_per_use,bqss_squeezed_bits_per_use,"
        "bqss_coherent_bits_per_use,plob_bits_per_use,r_opt_middle,g_opt_middle\n";
  for (const auto& p : pts)
    os << num(p.distance_km) << ',' << num(p.kss_middle) << ',' << num(p.kss_edge) << ',' << num(p.bqss_squeezed)
       << ',' << num(p.bqss_coherent) << ',' << num(p.plob) << ',' << num(p.r_middle) << ',' << num(p.g_middle)
       << '\n';
}

void write_finite_csv(std::ostream& os, const std::vector<FiniteCurvePoint>& pts) {
  schema_line(os, "rates-finite");
  os << "distance_km,m_rounds,qss_bits_per_use,qkd_bits_per_use,plob_lossy_bits_per_use,r_opt,g_opt,p_qss,p_qkd,"
        "gate_qss,gate_qkd\n";
  for (const auto& c : pts) {
    const FinitePoint& p = c.point;
    os << num(p.distance_km) << ',' << num(c.m) << ',' << num(p.qss.result.rate) << ',' << num(p.qkd.result.rate)
       << ',' << num(p.plob_lossy) << ',' << num(p.r) << ',' << num(p.g) << ',' << num(p.qss.p) << ','
       << num(p.qkd.p) << ',' << gate_name(p.qss.result.gate) << ',' << gate_name(p.qkd.result.gate) << '\n';
  }
}

Crossover find_crossover(const std::function<double(double)>& rate_a, const std::function<double(double)>& rate_b,
                         double lo, double hi, int grid_points, double tol) {
  if (!(hi > lo)) throw std::invalid_argument("find_crossover: empty range");
  if (grid_points < 2) throw std::invalid_argument("find_crossover: at least two grid points are required");
  if (!(tol > 0.0)) throw std::invalid_argument("find_crossover: tolerance must be positive");
  auto sign = [&](double d) {
    const double a = rate_a(d);
    const double b = rate_b(d);
    if (a == b) return 0;
    return a > b ? 1 : -1;
  };
  Crossover out;
  std::vector<double> xs(grid_points);
  std::vector<int> ss(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    xs[i] = lo + (hi - lo) * i / (grid_points - 1);
    ss[i] = sign(xs[i]);
  }
  // Nonzero reference sign to the left of each bracket; exact ties inside a run
  // of equal values are not counted as crossings.
  int prev = 0;
  int prev_i = -1;
  for (int i = 0; i < grid_points; ++i) {
    if (ss[i] == 0) continue;
    if (prev != 0 && ss[i] != prev) {
      double a = xs[prev_i];
      double b = xs[i];
      while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        const int sm = sign(mid);
        if (sm == 0) {
          a = b = mid;
          break;
        }
        if (sm == prev) a = mid;
        else b = mid;
      }
      out.crossings.push_back(0.5 * (a + b));
    }
    prev = ss[i];
    prev_i = i;
  }
  return out;
}

std::vector<BoundaryPoint> advantage_region(const RunConfig& cfg, Benchmark b, int workers) {
  const std::vector<double> dbs = cfg.squeezing_db.samples();
  const double lo = cfg.distance_km.start;
  const double hi = cfg.distance_km.stop;
  return parallel_map(dbs.size(), workers, [&](std::size_t i) {
    const double r_max = db_to_r(dbs[i]);
    BoundaryPoint bp;
    bp.squeezing_db = dbs[i];
    bp.crossover = find_crossover([&](double d) { return kss_at(d, r_max, cfg); },
                                  [&](double d) { return benchmark_rate(b, d, r_max); }, lo, hi,
                                  cfg.bracket_points, cfg.bisection_tol_km);
    return bp;
  });
}

double peak_advantage(double squeezing_db, const RunConfig& cfg, Benchmark b) {
  const double r_max = db_to_r(squeezing_db);
  auto gap = [&](double d) {
    const double diff = kss_at(d, r_max, cfg) - benchmark_rate(b, d, r_max);
    return std::isnan(diff) ? -std::numeric_limits<double>::infinity() : diff;
  };
  const double lo = cfg.distance_km.start;
  const double hi = cfg.distance_km.stop;
  const int n = std::max(cfg.bracket_points, 3);
  int best = 0;
  double best_gap = -std::numeric_limits<double>::infinity();
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = lo + (hi - lo) * i / (n - 1);
    const double g = gap(xs[i]);
    if (g > best_gap) {
      best_gap = g;
      best = i;
    }
  }
  const auto [x, g] = golden_max(gap, xs[std::max(best - 1, 0)], xs[std::min(best + 1, n - 1)], 1e-4);
  (void)x;
  return std::max(g, best_gap);
}

double advantage_onset_db(const RunConfig& cfg, Benchmark b, double lo_db, double hi_db, double tol_db) {
  if (!(hi_db > lo_db && lo_db > 0.0)) throw std::invalid_argument("advantage_onset_db: invalid squeezing range");
  if (!(peak_advantage(hi_db, cfg, b) > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  if (peak_advantage(lo_db, cfg, b) > 0.0) return lo_db;
  double a = lo_db;
  double c = hi_db;
  while (c - a > tol_db) {
    const double mid = 0.5 * (a + c);
    if (peak_advantage(mid, cfg, b) > 0.0) c = mid;
    else a = mid;
  }
  return 0.5 * (a + c);
}

// boundary_km is the last crossing, where the advantage ends; PLOB also has a
// near crossing because it diverges at zero distance.
void write_region_csv(std::ostream& os, const std::vector<BoundaryPoint>& pts, Benchmark b) {
  schema_line(os, "advantage-region");
  os << "squeezing_dB,benchmark,boundary_km,crossings_km\n";
  for (const auto& p : pts) {
    os << num(p.squeezing_db) << ',' << benchmark_name(b) << ','
       << (p.crossover.found() ? num(p.crossover.crossings.back()) : std::string("none")) << ',';
    for (std::size_t i = 0; i < p.crossover.crossings.size(); ++i)
      os << (i ? ";" : "") << num(p.crossover.crossings[i]);
    os << '\n';
  }
}

std::vector<OptimumPoint> optimize_params(const RunConfig& cfg, int workers) {
  const std::vector<double> ds = cfg.distance_km.samples();
  const double r_max = db_to_r(cfg.budget_db);
  const std::size_t nd = ds.size();
  return parallel_map(nd * cfg.block_sizes.size(), workers, [&](std::size_t i) {
    OptimumPoint o;
    o.distance_km = ds[i % nd];
    o.m = cfg.block_sizes[i / nd];
    const auto t = NetworkParams::symmetric(o.distance_km).transmissions();
    const OptimizedRate coarse = kss_optimized(t, r_max, cfg.dealer, cfg.strategy, cfg.optimizer_tol);
    const OptimizedRate fine = kss_optimized(t, r_max, cfg.dealer, cfg.strategy, cfg.optimizer_tol * 1e-2);
    o.r = coarse.r;
    o.g = coarse.g;
    o.r_refined = fine.r;
    o.converged = std::abs(coarse.r - fine.r) < 1e-3;
    FiniteSizeParams fs = cfg.finite;
    fs.m = o.m;
    const FinitePoint fp = finite_point(o.distance_km, cfg.finite_budget_r, cfg.network, fs);
    o.p_qss = fp.qss.p;
    o.p_qkd = fp.qkd.p;
    return o;
  });
}

void write_optimum_csv(std::ostream& os, const std::vector<OptimumPoint>& pts) {
  schema_line(os, "optimize");
  os << "distance_km,m_rounds,r_opt,g_opt,r_opt_refined,converged,p_qss,p_qkd\n";
  for (const auto& o : pts)
    os << num(o.distance_km) << ',' << num(o.m) << ',' << num(o.r) << ',' << num(o.g) << ',' << num(o.r_refined)
       << ',' << (o.converged ? "yes" : "no") << ',' << num(o.p_qss) << ',' << num(o.p_qkd) << '\n';
}

double OracleCheck::z() const {
  const double diff = std::abs(analytic - empirical);
  if (std_error <= 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / std_error;
}

double OracleScenario::max_abs_z() const {
  double z = 0.0;
  for (const auto& c : checks) z = std::max(z, c.z());
  return z;
}

NetworkParams random_scenario(std::uint64_t seed, int index) {
  std::mt19937_64 rng(derive_seed(seed ^ 0x5eed5eedULL, static_cast<std::uint64_t>(index)));
  std::uniform_real_distribution<double> dist(0.0, 5.0);
  std::uniform_real_distribution<double> sq(0.2, 1.6);
  std::uniform_real_distribution<double> gain(0.2, 1.5);
  std::uniform_real_distribution<double> noise(0.0, 0.01);
  NetworkParams p;
  for (double& d : p.distance_km) d = dist(rng);
  p.r = sq(rng);
  p.g = gain(rng);
  p.xi = noise(rng);
  return p;
}

std::vector<OracleScenario> mc_validate(const RunConfig& cfg, int workers) {
  const BinGrid grid = make_grid(cfg.finite.delta_p, cfg.finite.range_m);
  std::vector<OracleScenario> out;
  for (int i = 0; i < cfg.mc_scenarios; ++i) {
    OracleScenario sc;
    sc.params = random_scenario(cfg.seed, i);
    const CovMatrixd cm = experimental_cm(sc.params).cm;
    const QuadSel pa{kModeA, Quadrature::P};
    const QuadSel xb{kModeB, Quadrature::X};
    const MomentEstimates mom = expected_moments(cm, {pa, xb}, cfg.finite);
    const SampleBatch batch =
        sample_rounds(cm, {pa, xb}, cfg.mc_samples, derive_seed(cfg.seed, static_cast<std::uint64_t>(i)), workers);
    const EmpiricalMoments emp = empirical_moments(batch, 0, 1, grid, mom.a);
    sc.checks.push_back({"E[d]", mom.expected_d, emp.value.expected_d, emp.std_error.expected_d});
    sc.checks.push_back({"V_d", mom.v_d, emp.value.v_d, emp.std_error.v_d});
    sc.checks.push_back({"V_A", mom.v_a_pe, emp.value.v_a_pe, emp.std_error.v_a_pe});
    sc.checks.push_back({"V_B", mom.v_b_pe, emp.value.v_b_pe, emp.std_error.v_b_pe});
    const Regression reg = regress(batch, 0, 1);
    sc.checks.push_back({"slope", mom.a, reg.slope, reg.slope_se});
    const CovMatrixd cond = condition_homodyne(cm, kModeA, Quadrature::P);
    const double v_cond = cond.entries(quad_index(0, Quadrature::X, cond.modes(), cond.ordering),
                                       quad_index(0, Quadrature::X, cond.modes(), cond.ordering));
    sc.checks.push_back({"V_cond", v_cond, reg.residual_variance, reg.residual_variance_se});
    out.push_back(std::move(sc));
  }
  return out;
}

}  // namespace cvqss
