#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cvqss/graph_states.hpp"

#include <cmath>
#include <random>

using namespace cvqss;

TEST_CASE("gate circuit and adjacency form give the same line graph") {
  for (double r : {0.0, 0.5, 1.3, 2.7})
    for (double g : {0.0, 0.4, 1.0, 3.0}) {
      const SymplecticOpd circuit = canonical_line_graph(r, g);
      const SymplecticOpd adj = graph_symplectic(line_graph_spec(r, g));
      CHECK((circuit.matrix - adj.matrix).norm() <= 1e-12 * circuit.matrix.norm());
      CHECK(symplectic_defect(adj) <= 1e-12 * adj.matrix.squaredNorm());
    }
}

TEST_CASE("nullifiers of lossless graphs have variance e^{-2r}") {
  for (double r : {0.0, 0.7, 1.5, 2.68})
    for (double g : {0.3, 1.0, 2.5})
      for (const GraphSpec& spec : {line_graph_spec(r, g), triangle_graph_spec(r, g)}) {
        const CovMatrixd cm = evolve(vacuum(3), graph_symplectic(spec));
        for (double v : nullifier_variances(spec, cm)) CHECK(std::abs(v - std::exp(-2 * r)) <= 1e-10);
      }
}

TEST_CASE("graph validation") {
  GraphSpec spec = line_graph_spec(1.0, 1.0);
  spec.adjacency(0, 1) = 2.0;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec = line_graph_spec(1.0, 1.0);
  spec.adjacency(1, 1) = 1.0;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec = line_graph_spec(1.0, 1.0);
  spec.adjacency(0, 1) = spec.adjacency(1, 0) = -1.0;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
}

TEST_CASE("offline squeezing decomposition reproduces the line graph") {
  for (int i = 0; i <= 9; ++i)
    for (int j = 0; j <= 10; ++j) {
      const double r = 2.7 * i / 9.0;
      const double g = 3.0 * j / 10.0;
      const SymplecticOpd target = canonical_line_graph(r, g);
      const BlochMessiah bm = bloch_messiah(target);
      const Matd rebuilt = bloch_messiah_matrix(bm).matrix;
      const Matd gram = target.matrix * target.matrix.transpose();
      CHECK((rebuilt * rebuilt.transpose() - gram).cwiseAbs().maxCoeff() <= 1e-9 * gram.cwiseAbs().maxCoeff());
      // The passive part is orthogonal and symplectic.
      const Matd& o = bm.passive.matrix;
      CHECK((o * o.transpose() - Matd::Identity(6, 6)).norm() <= 1e-10);
      CHECK(symplectic_defect(bm.passive) <= 1e-10);
      REQUIRE(bm.squeezers.size() == 3);
      CHECK(std::abs(bm.squeezers.front() - line_graph_max_squeezer(r, g)) <= 1e-8);
      CHECK(std::is_sorted(bm.squeezers.rbegin(), bm.squeezers.rend()));
    }
}

TEST_CASE("single squeezer decomposes to itself") {
  const BlochMessiah bm = bloch_messiah(squeezer(-0.8));
  REQUIRE(bm.squeezers.size() == 1);
  CHECK(bm.squeezers[0] == doctest::Approx(0.8));
}

TEST_CASE("largest squeezer matches frozen reference values") {
  // Independent numpy evaluation of the closed form.
  CHECK(line_graph_max_squeezer(1.0, 0.9) == doctest::Approx(1.4837494810904224).epsilon(1e-12));
  CHECK(line_graph_max_squeezer(0.6, 0.0) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("budget allocation spends the whole budget") {
  CHECK(budget_solve(1.0, {2.0}) == doctest::Approx(1.785107729552839).epsilon(1e-12));
  CHECK(budget_solve(2.0, {2.0}) == doctest::Approx(0.0).epsilon(1e-7));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const double r_max = 0.1 + 2.6 * u(rng);
    const double r = r_max * u(rng);
    const double g = budget_solve(r, {r_max});
    CHECK(line_graph_max_squeezer(r, g) == doctest::Approx(r_max).epsilon(1e-10));
  }
  CHECK_THROWS_AS(budget_solve(2.5, {2.0}), std::invalid_argument);
}

TEST_CASE("decibel conversion") {
  CHECK(db_to_r(15.3) == doctest::Approx(1.7614).epsilon(1e-4));
  CHECK(r_to_db(db_to_r(7.5)) == doctest::Approx(7.5));
  CHECK(db_to_r(20.0) == doctest::Approx(std::log(10.0)));
}
