#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cvqss/graph_states.hpp"
#include "cvqss/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

using namespace cvqss;

TEST_CASE("axis sampling") {
  CHECK(Axis{0.0, 1.0, 0.25}.samples().size() == 5);
  CHECK(Axis{0.0, 0.0, 0.25}.samples().size() == 1);
  CHECK(Axis{1.0, 0.0, 0.25}.samples().empty());
  CHECK(Axis{0.0, 10.0, 0.1}.samples().size() == 101);
}

TEST_CASE("config defaults and overrides") {
  const RunConfig d = parse_config(R"({"schema_version": 1})");
  CHECK(d.budget_db == 15.0);
  CHECK(d.finite.eps_mu == 4e-20);
  CHECK(d.network.eta_f == 0.95);
  CHECK(d.finite_budget_r == 2.68);
  const RunConfig c = parse_config(R"({
    "schema_version": 1,
    "budget_db": 6.0,
    "finite_budget_r": 2.0,
    "dealer": "edge",
    "benchmark": "coherent",
    "network": {"xi": 0.01},
    "finite_size": {"ec_delta_power": 1, "delta_x": 0.2},
    "distance_km": {"start": 0.5, "stop": 2.0, "step": 0.5},
    "block_sizes": [1e10]
  })");
  CHECK(c.budget_db == 6.0);
  CHECK(c.benchmark_db == 6.0);
  CHECK(c.finite_budget_r == 2.0);
  CHECK(c.dealer == Dealer::Edge);
  CHECK(c.benchmark == Benchmark::Coherent);
  CHECK(c.network.xi == 0.01);
  CHECK(c.finite.ec_delta_power == 1);
  CHECK(c.finite.delta_x == 0.2);
  CHECK(c.distance_km.samples().size() == 4);
  CHECK(c.block_sizes == std::vector<double>{1e10});
}

TEST_CASE("config errors name the offending key") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(R"({"schema_version": 1, "budget": 3})").find("budget: unknown key") != std::string::npos);
  CHECK(message(R"({"schema_version": 1, "network": {"eta": 0.5}})").find("network.eta: unknown key") !=
        std::string::npos);
  CHECK(message(R"({"schema_version": 1, "distance_km": {"start": 0, "end": 2}})").find("distance_km.end") !=
        std::string::npos);
  CHECK(message(R"({"schema_version": 2})").find("schema_version") != std::string::npos);
  CHECK(message(R"({"budget_db": 3})").find("schema_version: required") != std::string::npos);
  CHECK(message(R"({"schema_version": 1, "budget_db": "high"})").find("budget_db: wrong type") !=
        std::string::npos);
  CHECK(message("{\"schema_version\": 1,\n \"budget_db\": }").find("line 2") != std::string::npos);
  CHECK(message(R"({"schema_version": 1, "network": {"eta_d": 1.5}})").find("efficiencies") != std::string::npos);
  CHECK(message(R"({"schema_version": 1, "finite_budget_r": -1})").find("finite_budget_r") != std::string::npos);
  CHECK(message(R"({"schema_version": 1, "dealer": "left"})").find("dealer") != std::string::npos);
  CHECK(message(R"({"schema_version": 1, "distance_km": {"step": 0}})").find("step") != std::string::npos);
}

TEST_CASE("worker count comes from the environment") {
  setenv(kWorkersEnv, "3", 1);
  CHECK(worker_count() == 3);
  setenv(kWorkersEnv, "zero", 1);
  CHECK_THROWS_AS(worker_count(), ConfigError);
  unsetenv(kWorkersEnv);
  CHECK(worker_count() >= 1);
}

TEST_CASE("parallel map keeps index order and propagates errors") {
  const auto v = parallel_map(100, 4, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == static_cast<int>(i * i));
  CHECK_THROWS_AS(parallel_map(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw std::runtime_error("boom");
                                 return 0;
                               }),
                  std::runtime_error);
}

TEST_CASE("crossover bisection") {
  auto a = [](double d) { return 10.0 - d; };
  auto b = [](double d) { return d; };
  const Crossover c = find_crossover(a, b, 0.0, 10.0, 7, 0.01);
  REQUIRE(c.crossings.size() == 1);
  CHECK(std::abs(c.crossings[0] - 5.0) <= 0.01);
  CHECK_FALSE(find_crossover(a, a, 0.0, 10.0).found());
  const Crossover many = find_crossover([](double d) { return std::sin(d); }, [](double) { return 0.0; }, 0.5, 10.0,
                                        60, 1e-4);
  REQUIRE(many.crossings.size() == 3);
  CHECK(many.crossings[0] == doctest::Approx(M_PI).epsilon(1e-4));
  CHECK(many.crossings[2] == doctest::Approx(3 * M_PI).epsilon(1e-4));
  CHECK_THROWS_AS(find_crossover(a, b, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("asymptotic crossover against the squeezed benchmark") {
  RunConfig cfg;
  const double r = db_to_r(cfg.budget_db);
  const Crossover c = find_crossover([&](double d) { return kss_at(d, r, cfg); },
                                     [&](double d) { return benchmark_rate(Benchmark::Squeezed, d, r); }, 0.0, 10.0);
  REQUIRE(c.crossings.size() == 1);
  CHECK(c.crossings[0] > 3.0);
  CHECK(c.crossings[0] < 3.7);
}

TEST_CASE("curve tables") {
  RunConfig cfg;
  cfg.distance_km = {1.0, 0.0, 0.5};
  std::ostringstream empty;
  write_asymptotic_csv(empty, run_asymptotic_curve(cfg, 1));
  const std::string header_only = empty.str();
  CHECK(std::count(header_only.begin(), header_only.end(), '\n') == 2);
  CHECK(header_only.find("distance_km,kss_middle_bits_per_use") != std::string::npos);

  cfg.distance_km = {0.0, 3.0, 0.5};
  std::ostringstream serial, parallel, again;
  write_asymptotic_csv(serial, run_asymptotic_curve(cfg, 1));
  write_asymptotic_csv(parallel, run_asymptotic_curve(cfg, 3));
  write_asymptotic_csv(again, run_asymptotic_curve(cfg, 1));
  CHECK(serial.str() == parallel.str());
  CHECK(serial.str() == again.str());
  CHECK(serial.str().find(",inf,") != std::string::npos);

  const auto pts = run_asymptotic_curve(cfg, 1);
  for (const auto& p : pts) {
    CHECK(p.kss_middle >= p.kss_edge - 1e-9);
    CHECK(p.bqss_squeezed >= 0.0);
    // Every emitted value is reproducible from the module call.
    CHECK(p.kss_middle == kss_at(p.distance_km, db_to_r(cfg.budget_db), cfg));
  }
}

TEST_CASE("finite-size table") {
  RunConfig cfg;
  cfg.distance_km = {0.0, 1.0, 1.0};
  cfg.block_sizes = {1e9, 1e12};
  std::ostringstream serial, parallel;
  const auto pts = run_finite_curve(cfg, 1);
  REQUIRE(pts.size() == 4);
  write_finite_csv(serial, pts);
  write_finite_csv(parallel, run_finite_curve(cfg, 2));
  CHECK(serial.str() == parallel.str());
  CHECK(serial.str().find("qss_bits_per_use,qkd_bits_per_use,plob_lossy_bits_per_use") != std::string::npos);
  for (const auto& c : pts) {
    CHECK(c.point.qss.result.rate >= 0.0);
    CHECK(c.point.qss.result.gate == Gate::Ok);
  }
}

TEST_CASE("degenerate advantage grid") {
  RunConfig cfg;
  cfg.squeezing_db = {15.0, 15.0, 1.0};
  cfg.distance_km = {0.0, 10.0, 0.1};
  const auto region = advantage_region(cfg, Benchmark::Plob, 1);
  REQUIRE(region.size() == 1);
  CHECK(region[0].crossover.found());
  std::ostringstream os;
  write_region_csv(os, region, Benchmark::Plob);
  CHECK(os.str().find("squeezing_dB,benchmark,boundary_km") != std::string::npos);
  // The reported boundary is the far crossing.
  REQUIRE(region[0].crossover.crossings.size() == 2);
  const std::string table = os.str();
  const std::size_t row = table.find("\n15,plob,") + 9;
  CHECK(std::stod(table.substr(row, table.find(',', row) - row)) ==
        doctest::Approx(region[0].crossover.crossings.back()).epsilon(1e-9));
  cfg.squeezing_db = {3.0, 3.0, 1.0};
  const auto none = advantage_region(cfg, Benchmark::Plob, 1);
  CHECK_FALSE(none[0].crossover.found());
  std::ostringstream os2;
  write_region_csv(os2, none, Benchmark::Plob);
  CHECK(os2.str().find(",none,") != std::string::npos);
}

TEST_CASE("parameter optimisation") {
  RunConfig cfg;
  cfg.distance_km = {0.0, 4.0, 2.0};
  cfg.block_sizes = {1e12};
  const auto pts = optimize_params(cfg, 1);
  REQUIRE(pts.size() == 3);
  const double r_max = db_to_r(cfg.budget_db);
  CHECK(pts[0].r > 0.0);
  CHECK(pts[0].r < r_max);
  for (const auto& p : pts) {
    CHECK(p.converged);
    CHECK(std::abs(p.r - p.r_refined) < 1e-3);
    CHECK(p.p_qkd > p.p_qss);
  }
}

TEST_CASE("small oracle run agrees") {
  RunConfig cfg;
  cfg.mc_scenarios = 2;
  cfg.mc_samples = 200000;
  for (const auto& s : mc_validate(cfg, 1)) CHECK(s.max_abs_z() <= 5.0);
  CHECK(random_scenario(1, 0).r == random_scenario(1, 0).r);
}
