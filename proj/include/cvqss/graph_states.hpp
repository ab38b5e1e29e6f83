#pragma once

// CV graph states: canonical squeezer+CZ circuits, nullifiers, offline-squeezing
// decomposition and squeezing-budget allocation.

#include "cvqss/gaussian.hpp"

#include <vector>

namespace cvqss {

struct GraphSpec {
  Matd adjacency;  // symmetric, zero diagonal, non-negative weights
  double initial_squeezing = 0.0;
};

struct BlochMessiah {
  SymplecticOpd passive;
  std::vector<double> squeezers;  // descending, each applied as S(-r_i)
};

struct SqueezeBudget {
  double r_max = 0.0;
};

void validate(const GraphSpec& spec);

// Line graph A-B-C from p-squeezed vacua: CZ_BC(g) CZ_AB(g) S_C(-r) S_B(-r) S_A(-r).
SymplecticOpd canonical_line_graph(double r, double g);

// Adjacency-form construction, returned in XPXP ordering.
SymplecticOpd graph_symplectic(const GraphSpec& spec);

GraphSpec line_graph_spec(double r, double g);
GraphSpec triangle_graph_spec(double r, double g);

std::vector<double> nullifier_variances(const GraphSpec& spec, const CovMatrixd& cm);

BlochMessiah bloch_messiah(const SymplecticOpd& target);

// Composition L * (+) S(-r_i) as a single symplectic matrix.
SymplecticOpd bloch_messiah_matrix(const BlochMessiah& bm);

// Largest offline squeezer of the line graph (the B and C squeezers).
double line_graph_max_squeezer(double r, double g);

// Gate strength g >= 0 that spends the whole budget at initial squeezing r.
double budget_solve(double r, const SqueezeBudget& budget);

double db_to_r(double db);
double r_to_db(double r);

}  // namespace cvqss
