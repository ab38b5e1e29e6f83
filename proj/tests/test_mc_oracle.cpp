#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cvqss/estimation.hpp"
#include "cvqss/mc_oracle.hpp"

#include <cmath>

using namespace cvqss;

namespace {

CovMatrixd tmsv(double r) {
  SymplecticOpd op = embed(squeezer(r), {0}, 2);
  op = compose(embed(squeezer(-r), {1}, 2), op);
  op = compose(beamsplitter(0.5), op);
  return evolve(vacuum(2), op);
}

}  // namespace

TEST_CASE("vacuum samples have unit variance") {
  const SampleBatch b = sample_rounds(vacuum(2), {{0, Quadrature::X}, {1, Quadrature::P}}, 1000000, 1);
  for (int c = 0; c < 2; ++c) {
    const double var = b.outcomes.col(c).squaredNorm() / b.count;
    CHECK(std::abs(var - 1.0) <= 0.005);
  }
}

TEST_CASE("two-mode squeezed correlation") {
  const double r = 0.6;
  const long n = 1000000;
  const SampleBatch b = sample_rounds(tmsv(r), {{0, Quadrature::X}, {1, Quadrature::X}}, n, 42);
  const auto x = b.outcomes.col(0);
  const auto y = b.outcomes.col(1);
  const double rho = x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());
  const double expected = std::tanh(2 * r);
  const double se = (1 - expected * expected) / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(std::abs(rho) - expected) <= 5 * se);
}

TEST_CASE("sampling is reproducible and independent of the worker count") {
  const CovMatrixd cm = tmsv(0.9);
  const std::vector<QuadSel> sel{{0, Quadrature::X}, {1, Quadrature::P}};
  const SampleBatch a = sample_rounds(cm, sel, 200000, 7, 1);
  const SampleBatch b = sample_rounds(cm, sel, 200000, 7, 1);
  const SampleBatch c = sample_rounds(cm, sel, 200000, 7, 4);
  CHECK(a.outcomes == b.outcomes);
  CHECK(a.outcomes == c.outcomes);
  const SampleBatch d = sample_rounds(cm, sel, 200000, 8, 1);
  CHECK(a.outcomes != d.outcomes);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
}

TEST_CASE("non-positive-definite selections are rejected") {
  CovMatrixd cm = vacuum(2);
  cm.entries(0, 2) = cm.entries(2, 0) = 1.0;
  CHECK_THROWS_AS(sample_rounds(cm, {{0, Quadrature::X}, {1, Quadrature::X}}, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_rounds(vacuum(1), {{3, Quadrature::X}}, 10, 1), std::invalid_argument);
}

TEST_CASE("perfectly correlated pair lands in the same bins") {
  CovMatrixd cm = vacuum(2);
  cm.entries(0, 0) = cm.entries(2, 2) = 4.0;
  cm.entries(0, 2) = cm.entries(2, 0) = 4.0 - 1e-8;
  const SampleBatch b = sample_rounds(cm, {{0, Quadrature::X}, {1, Quadrature::X}}, 100000, 3);
  const EmpiricalMoments e = empirical_moments(b, 0, 1, make_grid(0.4, 25.0), 1.0);
  CHECK(e.value.expected_d < 0.01);
}

TEST_CASE("standard errors follow the square-root law") {
  NetworkParams p = NetworkParams::symmetric(1.0);
  p.r = 1.0;
  p.g = 0.8;
  const CovMatrixd cm = experimental_cm(p).cm;
  const std::vector<QuadSel> sel{{kModeA, Quadrature::P}, {kModeB, Quadrature::X}};
  const BinGrid g = make_grid(0.4, 25.0);
  const auto full = empirical_moments(sample_rounds(cm, sel, 400000, 5), 0, 1, g, 1.0);
  const auto half = empirical_moments(sample_rounds(cm, sel, 200000, 5), 0, 1, g, 1.0);
  const double ratio = std::pow(half.std_error.expected_d / full.std_error.expected_d, 2);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("Schur complement agrees with sampled conditioning") {
  NetworkParams p = NetworkParams::symmetric(1.5);
  p.r = 1.3;
  p.g = 1.1;
  const CovMatrixd cm = experimental_cm(p).cm;
  const SampleBatch b = sample_rounds(cm, {{kModeA, Quadrature::P}, {kModeB, Quadrature::X}}, 1000000, 11);
  const Regression reg = regress(b, 0, 1);
  const CovMatrixd cond = condition_homodyne(cm, kModeA, Quadrature::P);
  const double v_cond = cond.entries(0, 0);
  CHECK(std::abs(reg.residual_variance - v_cond) <= 5 * reg.residual_variance_se);
  const double a = rescale_factor(cm, {kModeA, Quadrature::P}, {kModeB, Quadrature::X});
  CHECK(std::abs(reg.slope - a) <= 5 * reg.slope_se);
}

TEST_CASE("empirical moments agree with the analytic expectation") {
  NetworkParams p = NetworkParams::symmetric(1.0);
  p.r = 2.25;
  p.g = 0.3;
  const CovMatrixd cm = experimental_cm(p).cm;
  const CheckPair pair{{kModeA, Quadrature::P}, {kModeB, Quadrature::X}};
  const FiniteSizeParams fs;
  const MomentEstimates mom = expected_moments(cm, pair, fs);
  const SampleBatch b = sample_rounds(cm, {pair.trusted, pair.partner}, 1000000, 2024);
  const EmpiricalMoments e = empirical_moments(b, 0, 1, make_grid(fs.delta_p, fs.range_m), mom.a);
  CHECK(std::abs(e.value.expected_d - mom.expected_d) <= 5 * e.std_error.expected_d);
  CHECK(std::abs(e.value.v_d - mom.v_d) <= 5 * e.std_error.v_d);
  CHECK(std::abs(e.value.v_a_pe - mom.v_a_pe) <= 5 * e.std_error.v_a_pe);
  CHECK(std::abs(e.value.v_b_pe - mom.v_b_pe) <= 5 * e.std_error.v_b_pe);
}
