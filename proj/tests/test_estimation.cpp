#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cvqss/estimation.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace cvqss;

TEST_CASE("bin grid layout") {
  const BinGrid g = make_grid(0.4, 25.0);
  CHECK(g.count == 125);
  CHECK(g.edges.size() == 126);
  CHECK(std::isinf(g.edges.front()));
  CHECK(std::isinf(g.edges.back()));
  CHECK(g.index(0) == -62.0);
  CHECK(g.index(124) == 62.0);
  CHECK(g.locate(-1e6) == 0);
  CHECK(g.locate(1e6) == 124);
  CHECK(g.index(g.locate(0.0)) == 0.0);
  CHECK(g.index(g.locate(0.41)) == 1.0);
  // Intervals are closed on the right.
  CHECK(g.locate(-25.0 + 0.4) == 0);
  CHECK_THROWS_AS(make_grid(0.3, 25.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(-0.4, 25.0), std::invalid_argument);
}

TEST_CASE("rectangle probabilities match an independent reference") {
  // scipy multivariate normal CDF differences on edges {-inf,-0.5,0,0.5,inf}.
  const double ref[4][4] = {{0.176478114118, 0.072696618018, 0.048919528299, 0.032407162377},
                            {0.053023404726, 0.041385384043, 0.037917743298, 0.037172045121},
                            {0.037172045121, 0.037917743298, 0.041385384043, 0.053023404726},
                            {0.032407162377, 0.048919528299, 0.072696618018, 0.176478114118}};
  const BinGrid g = make_grid(0.5, 1.0);
  const Matd p = joint_bin_probability(g, g, {1.3, 0.9, 0.6});
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) CHECK(std::abs(p(j, k) - ref[j][k]) <= 1e-9);
}

TEST_CASE("rectangle probabilities are normalised with the right marginals") {
  const BinGrid g = make_grid(0.4, 25.0);
  const Bivariate dist{30.0, 40.0, 33.0};
  const Matd p = joint_bin_probability(g, g, dist);
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(p.minCoeff() >= -1e-15);
  const auto ma = bin_probability_1d(g, dist.va);
  const auto mb = bin_probability_1d(g, dist.vb);
  for (int k = 0; k < g.count; ++k) {
    CHECK(std::abs(p.row(k).sum() - ma[k]) <= 1e-8);
    CHECK(std::abs(p.col(k).sum() - mb[k]) <= 1e-8);
  }
  CHECK_THROWS_AS(joint_bin_probability(g, g, {1.0, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("expected moments match an independent reference") {
  // numpy: Gauss-Legendre rows with truncated tails on the (p_A, x_B) pair of the
  // 13-mode state at r=1.2, g=0.8, 2 km links.
  NetworkParams p = NetworkParams::symmetric(2.0);
  p.r = 1.2;
  p.g = 0.8;
  const CovMatrixd cm = experimental_cm(p).cm;
  const MomentEstimates m = expected_moments(cm, {{kModeA, Quadrature::P}, {kModeB, Quadrature::X}}, FiniteSizeParams{});
  CHECK(m.a == doctest::Approx(1.1981270532624846).epsilon(1e-12));
  CHECK(m.expected_d == doctest::Approx(1.4095005744043316).epsilon(1e-7));
  CHECK(m.v_d == doctest::Approx(3.2873549573517895).epsilon(1e-7));
  CHECK(m.v_a_pe == doctest::Approx(55.877812411407824).epsilon(1e-7));
  CHECK(m.v_b_pe == doctest::Approx(58.998500702092876).epsilon(1e-7));
}

TEST_CASE("rescaling factor and conditional variance agree with the closed form") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    NetworkParams p;
    p.distance_km = {8 * u(rng), 8 * u(rng), 8 * u(rng)};
    p.r = 0.1 + 2.5 * u(rng);
    p.g = 0.1 + 2.0 * u(rng);
    p.xi = 0.02 * u(rng);
    const CovMatrixd cm = experimental_cm(p).cm;
    const double a = rescale_factor(cm, {kModeA, Quadrature::P}, {kModeB, Quadrature::X});
    CHECK(a == doctest::Approx(rescale_factor_closed_form(p)).epsilon(1e-10));
    const CheckVariance v = conditional_check_variance(p);
    CHECK(v.schur == doctest::Approx(v.closed_form).epsilon(1e-10));
    CHECK(v.schur > 0.0);
  }
  const CovMatrixd cm = experimental_cm(NetworkParams{}).cm;
  CHECK_THROWS_AS(rescale_factor(cm, {kModeA, Quadrature::P}, {kModeA, Quadrature::X}), std::invalid_argument);
}

TEST_CASE("reconciliation leakage") {
  const double h = std::log2(2 * std::numbers::pi * std::numbers::e);
  CHECK(ec_leakage(2.0, 1.0, 1.0, 5.0, 5.0) == doctest::Approx(h + std::log2(5.0)));
  CHECK(ec_leakage(2.0, 0.5, 0.1, 4.0, 1.0, 1) ==
        doctest::Approx(std::log2(2 * std::numbers::pi * std::numbers::e * 40.0) - 1.0));
  CHECK(ec_leakage(2.0, 1.0, 0.1, 4.0, 1.0, 2) - ec_leakage(2.0, 1.0, 0.1, 4.0, 1.0, 1) ==
        doctest::Approx(std::log2(10.0)));
  CHECK_THROWS_AS(ec_leakage(1.0, 1.2, 0.1, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("finite-size parameter validation") {
  FiniteSizeParams fs;
  CHECK_NOTHROW(validate(fs));
  fs.eps_1 = 2 * fs.eps_s;
  CHECK_THROWS_AS(validate(fs), std::invalid_argument);
  fs = FiniteSizeParams{};
  fs.delta_p = 60.0;
  CHECK_THROWS_AS(validate(fs), std::invalid_argument);
  fs = FiniteSizeParams{};
  fs.ec_delta_power = 3;
  CHECK_THROWS_AS(validate(fs), std::invalid_argument);
}

TEST_CASE("normal cdf") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975));
}
