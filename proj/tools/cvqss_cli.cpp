// Command-line front end for rate curves, crossovers, advantage contours,
// parameter optimisation and the Monte Carlo oracle check.

#include "cvqss/graph_states.hpp"
#include "cvqss/sweep.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

using namespace cvqss;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitGate = 3;
constexpr int kExitOracle = 4;

struct Overrides {
  std::string config;
  std::optional<std::string> output;
  std::optional<double> budget_db, benchmark_db, finite_budget_r;
  std::optional<std::string> dealer, strategy, benchmark;
  std::optional<double> d_start, d_stop, d_step;
  std::optional<double> db_start, db_stop, db_step;
  std::vector<double> block_sizes;
  std::optional<double> tol_km;
  std::optional<int> ec_delta_power;
  std::optional<long> samples;
  std::optional<int> scenarios;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "JSON run configuration");
  cmd->add_option("-o,--output", o.output, "output CSV path, '-' for stdout");
  cmd->add_option("--budget-db", o.budget_db, "graph-state squeezing budget in dB");
  cmd->add_option("--benchmark-db", o.benchmark_db, "benchmark squeezing in dB");
  cmd->add_option("--finite-budget-r", o.finite_budget_r, "initial squeezing ceiling for finite-size runs");
  cmd->add_option("--dealer", o.dealer, "middle or edge");
  cmd->add_option("--strategy", o.strategy, "hub_out or player_in");
  cmd->add_option("--d-start", o.d_start, "first distance in km");
  cmd->add_option("--d-stop", o.d_stop, "last distance in km");
  cmd->add_option("--d-step", o.d_step, "distance step in km");
  cmd->add_option("--m", o.block_sizes, "key-round block sizes");
  cmd->add_option("--ec-delta-power", o.ec_delta_power, "power of the key resolution in the leakage term");
}

RunConfig resolve(const Overrides& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.output) cfg.output = *o.output;
  if (o.budget_db) {
    cfg.budget_db = *o.budget_db;
    if (!o.benchmark_db) cfg.benchmark_db = *o.budget_db;
  }
  if (o.benchmark_db) cfg.benchmark_db = *o.benchmark_db;
  if (o.finite_budget_r) cfg.finite_budget_r = *o.finite_budget_r;
  if (o.dealer) {
    if (*o.dealer == "middle") cfg.dealer = Dealer::Middle;
    else if (*o.dealer == "edge") cfg.dealer = Dealer::Edge;
    else throw ConfigError("--dealer: expected middle or edge");
  }
  if (o.strategy) {
    if (*o.strategy == "hub_out") cfg.strategy = Strategy::HubOut;
    else if (*o.strategy == "player_in") cfg.strategy = Strategy::PlayerIn;
    else throw ConfigError("--strategy: expected hub_out or player_in");
  }
  if (o.benchmark) cfg.benchmark = parse_benchmark(*o.benchmark);
  if (o.d_start) cfg.distance_km.start = *o.d_start;
  if (o.d_stop) cfg.distance_km.stop = *o.d_stop;
  if (o.d_step) cfg.distance_km.step = *o.d_step;
  if (o.db_start) cfg.squeezing_db.start = *o.db_start;
  if (o.db_stop) cfg.squeezing_db.stop = *o.db_stop;
  if (o.db_step) cfg.squeezing_db.step = *o.db_step;
  if (!o.block_sizes.empty()) cfg.block_sizes = o.block_sizes;
  if (o.tol_km) cfg.bisection_tol_km = *o.tol_km;
  if (o.ec_delta_power) cfg.finite.ec_delta_power = *o.ec_delta_power;
  if (o.samples) cfg.mc_samples = *o.samples;
  if (o.scenarios) cfg.mc_scenarios = *o.scenarios;
  if (o.seed) cfg.seed = *o.seed;
  validate(cfg);
  return cfg;
}

// Opens the configured output, falling back to stdout for "-".
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("output: cannot open " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int cmd_rates_asymptotic(const RunConfig& cfg, int workers) {
  Sink out(cfg.output);
  write_asymptotic_csv(out.stream(), run_asymptotic_curve(cfg, workers));
  return kExitOk;
}

int cmd_rates_finite(const RunConfig& cfg, int workers) {
  const auto pts = run_finite_curve(cfg, workers);
  Sink out(cfg.output);
  write_finite_csv(out.stream(), pts);
  int code = kExitOk;
  for (const auto& c : pts)
    for (Gate g : {c.point.qss.result.gate, c.point.qkd.result.gate})
      if (g != Gate::Ok) {
        std::fprintf(stderr, "gate failure: %s at distance_km=%g m=%g\n", gate_name(g).c_str(),
                     c.point.distance_km, c.m);
        code = kExitGate;
      }
  return code;
}

int cmd_crossover(const RunConfig& cfg, bool finite, int workers) {
  Sink out(cfg.output);
  auto& os = out.stream();
  const double lo = cfg.distance_km.start;
  const double hi = cfg.distance_km.stop;
  const double r_max = db_to_r(cfg.budget_db);
  os << "# cvqss crossover schema " << kSchemaVersion << "\n";
  os << "comparison,m_rounds,crossing_km\n";
  auto report = [&](const std::string& label, double m, const Crossover& c) {
    if (!c.found()) std::fprintf(stderr, "%s: no crossover in range\n", label.c_str());
    for (double x : c.crossings) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.10g,%.10g", m, x);
      os << label << ',' << buf << '\n';
    }
  };
  if (!finite) {
    const double r_bench = db_to_r(cfg.benchmark_db);
    const auto c = find_crossover([&](double d) { return kss_at(d, r_max, cfg); },
                                  [&](double d) { return benchmark_rate(cfg.benchmark, d, r_bench); }, lo, hi,
                                  cfg.bracket_points, cfg.bisection_tol_km);
    report("kss_vs_" + benchmark_name(cfg.benchmark), 0.0, c);
    return kExitOk;
  }
  const auto found = parallel_map(cfg.block_sizes.size(), workers, [&](std::size_t i) {
    FiniteSizeParams fs = cfg.finite;
    fs.m = cfg.block_sizes[i];
    auto qss = [&](double d) { return finite_point(d, cfg.finite_budget_r, cfg.network, fs).qss.result.rate; };
    auto qkd = [&](double d) { return finite_point(d, cfg.finite_budget_r, cfg.network, fs).qkd.result.rate; };
    return find_crossover(qss, qkd, lo, hi, cfg.bracket_points, cfg.bisection_tol_km);
  });
  for (std::size_t i = 0; i < found.size(); ++i) report("finite_qss_vs_qkd", cfg.block_sizes[i], found[i]);
  return kExitOk;
}

int cmd_region(const RunConfig& cfg, int workers) {
  Sink out(cfg.output);
  write_region_csv(out.stream(), advantage_region(cfg, cfg.benchmark, workers), cfg.benchmark);
  return kExitOk;
}

int cmd_optimize(const RunConfig& cfg, int workers) {
  const auto pts = optimize_params(cfg, workers);
  Sink out(cfg.output);
  write_optimum_csv(out.stream(), pts);
  for (const auto& p : pts)
    if (!p.converged) std::fprintf(stderr, "optimizer did not converge at distance_km=%g\n", p.distance_km);
  return kExitOk;
}

int cmd_mc_validate(const RunConfig& cfg, int workers) {
  const auto scenarios = mc_validate(cfg, workers);
  Sink out(cfg.output);
  auto& os = out.stream();
  os << "# cvqss mc-validate schema " << kSchemaVersion << "\n";
  os << "scenario,check,analytic,empirical,std_error,z\n";
  bool ok = true;
  for (std::size_t i = 0; i < scenarios.size(); ++i)
    for (const auto& c : scenarios[i].checks) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%zu,%s,%.10g,%.10g,%.4g,%.3f", i, c.name.c_str(), c.analytic, c.empirical,
                    c.std_error, c.z());
      os << buf << '\n';
      if (!(c.z() <= 5.0)) ok = false;
    }
  if (!ok) {
    std::fprintf(stderr, "oracle validation failed: some |z| exceeds 5\n");
    return kExitOracle;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-variable graph-state secret sharing rates"};
  app.require_subcommand(1);
  Overrides o;

  auto* rates = app.add_subcommand("rates", "rate curves versus distance");
  rates->require_subcommand(1);
  auto* asym = rates->add_subcommand("asymptotic", "asymptotic rates and benchmarks");
  auto* fin = rates->add_subcommand("finite", "finite-size rates");
  auto* cross = app.add_subcommand("crossover", "distance where two rate curves meet");
  auto* region = app.add_subcommand("advantage-region", "advantage boundary over squeezing and distance");
  auto* opt = app.add_subcommand("optimize", "optimal squeezing and key-basis probability per distance");
  auto* mc = app.add_subcommand("mc-validate", "Monte Carlo check of the analytic moments");
  bool finite_cross = false;
  for (auto* cmd : {asym, fin, cross, region, opt, mc}) add_common(cmd, o);
  for (auto* cmd : {cross, region}) {
    cmd->add_option("--benchmark", o.benchmark, "plob, squeezed or coherent");
    cmd->add_option("--tol-km", o.tol_km, "bisection tolerance in km");
  }
  cross->add_flag("--finite", finite_cross, "compare finite-size QSS against QKD");
  region->add_option("--db-start", o.db_start, "first squeezing level in dB");
  region->add_option("--db-stop", o.db_stop, "last squeezing level in dB");
  region->add_option("--db-step", o.db_step, "squeezing step in dB");
  mc->add_option("--samples", o.samples, "samples per scenario");
  mc->add_option("--scenarios", o.scenarios, "number of random scenarios");
  mc->add_option("--seed", o.seed, "base seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const RunConfig cfg = resolve(o);
    const int workers = worker_count();
    if (asym->parsed()) return cmd_rates_asymptotic(cfg, workers);
    if (fin->parsed()) return cmd_rates_finite(cfg, workers);
    if (cross->parsed()) return cmd_crossover(cfg, finite_cross, workers);
    if (region->parsed()) return cmd_region(cfg, workers);
    if (opt->parsed()) return cmd_optimize(cfg, workers);
    if (mc->parsed()) return cmd_mc_validate(cfg, workers);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitOk;
}
