#pragma once

// Configuration-driven sweeps: rate curves, crossover bisection, advantage
// contours, per-distance optimisation and the Monte Carlo moment check.

#include "cvqss/network.hpp"
#include "cvqss/params.hpp"
#include "cvqss/rates_asymptotic.hpp"
#include "cvqss/rates_finite.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace cvqss {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kWorkersEnv = "CVQSS_WORKERS";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Benchmark { Plob, Squeezed, Coherent };

struct Axis {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;
  // Samples start, start+step, ... up to stop; empty when stop < start.
  std::vector<double> samples() const;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  NetworkParams network;
  FiniteSizeParams finite;
  double budget_db = 15.0;
  // Initial squeezing ceiling for the finite-size curves (inferred 2.68).
  double finite_budget_r = 2.68;
  double benchmark_db = 15.0;  // squeezing of the bipartite benchmarks
  Dealer dealer = Dealer::Middle;
  Strategy strategy = Strategy::HubOut;
  Benchmark benchmark = Benchmark::Plob;
  Axis distance_km{0.0, 10.0, 0.1};
  Axis squeezing_db{1.0, 20.0, 0.5};
  std::vector<double> block_sizes{1e9, 1e12};
  double bisection_tol_km = 0.01;
  int bracket_points = 50;
  double optimizer_tol = 1e-4;
  long mc_samples = 1000000;
  int mc_scenarios = 20;
  std::uint64_t seed = 20240101;
  std::string output = "-";
};

// Parses and validates a JSON document; unknown keys and out-of-range values
// raise ConfigError naming the offending key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
void validate(const RunConfig& cfg);

Benchmark parse_benchmark(const std::string& name);
std::string benchmark_name(Benchmark b);

int worker_count();

// Evaluates f(0..n-1) on a pool of threads and returns results in index order.
template <typename F>
auto parallel_map(std::size_t n, int workers, F&& f) -> std::vector<decltype(f(std::size_t{}))> {
  using R = decltype(f(std::size_t{}));
  std::vector<R> out(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t i = next++; i < n && !failed; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  const int w = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (w <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < w; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

struct AsymptoticPoint {
  double distance_km = 0.0;
  double kss_middle = 0.0;
  double kss_edge = 0.0;
  double bqss_squeezed = 0.0;
  double bqss_coherent = 0.0;
  double plob = 0.0;
  double r_middle = 0.0;
  double g_middle = 0.0;
};

AsymptoticPoint asymptotic_point(double distance_km, const RunConfig& cfg);
double benchmark_rate(Benchmark b, double distance_km, double benchmark_r);
double kss_at(double distance_km, double r_max, const RunConfig& cfg);

std::vector<AsymptoticPoint> run_asymptotic_curve(const RunConfig& cfg, int workers);

struct FiniteCurvePoint {
  double m = 0.0;
  FinitePoint point;
};

std::vector<FiniteCurvePoint> run_finite_curve(const RunConfig& cfg, int workers);

void write_asymptotic_csv(std::ostream& os, const std::vector<AsymptoticPoint>& pts);
void write_finite_csv(std::ostream& os, const std::vector<FiniteCurvePoint>& pts);

struct Crossover {
  std::vector<double> crossings;  // every sign change of rate_a - rate_b, ascending
  bool found() const { return !crossings.empty(); }
};

// Brackets sign changes of a - b on a uniform grid, then bisects each to tol.
Crossover find_crossover(const std::function<double(double)>& rate_a, const std::function<double(double)>& rate_b,
                         double lo, double hi, int grid_points = 50, double tol = 0.01);

struct BoundaryPoint {
  double squeezing_db = 0.0;
  Crossover crossover;
};

std::vector<BoundaryPoint> advantage_region(const RunConfig& cfg, Benchmark b, int workers);
// Largest advantage of K_SS over the benchmark along the distance axis.
double peak_advantage(double squeezing_db, const RunConfig& cfg, Benchmark b);

// Smallest squeezing in [lo_db, hi_db] with a positive peak advantage, found by
// bisection to tol_db; NaN when the advantage is absent at hi_db.
double advantage_onset_db(const RunConfig& cfg, Benchmark b, double lo_db, double hi_db, double tol_db = 0.01);

void write_region_csv(std::ostream& os, const std::vector<BoundaryPoint>& pts, Benchmark b);

struct OptimumPoint {
  double distance_km = 0.0;
  double r = 0.0;
  double g = 0.0;
  double r_refined = 0.0;  // same optimisation at a tighter tolerance
  bool converged = true;
  double m = 0.0;
  double p_qss = 0.0;
  double p_qkd = 0.0;
};

std::vector<OptimumPoint> optimize_params(const RunConfig& cfg, int workers);
void write_optimum_csv(std::ostream& os, const std::vector<OptimumPoint>& pts);

struct OracleCheck {
  std::string name;
  double analytic = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;
  double z() const;
};

struct OracleScenario {
  NetworkParams params;
  std::vector<OracleCheck> checks;
  double max_abs_z() const;
};

// Draws random network scenarios and compares analytic moments, the rescaling
// slope and the conditional check variance with Monte Carlo estimates.
std::vector<OracleScenario> mc_validate(const RunConfig& cfg, int workers);
NetworkParams random_scenario(std::uint64_t seed, int index);

}  // namespace cvqss
