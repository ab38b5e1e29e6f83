#include "cvqss/graph_states.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cvqss {

void validate(const GraphSpec& spec) {
  const Matd& a = spec.adjacency;
  if (a.rows() != a.cols() || a.rows() == 0)
    throw std::invalid_argument("graph: adjacency must be a non-empty square matrix");
  for (int i = 0; i < a.rows(); ++i) {
    if (a(i, i) != 0.0) throw std::invalid_argument("graph: adjacency diagonal must be zero");
    for (int j = 0; j < a.cols(); ++j) {
      if (std::abs(a(i, j) - a(j, i)) > 1e-12)
        throw std::invalid_argument("graph: adjacency must be symmetric");
      if (a(i, j) < 0.0) throw std::invalid_argument("graph: edge weights must be non-negative");
    }
  }
}

SymplecticOpd canonical_line_graph(double r, double g) {
  if (r < 0.0) throw std::invalid_argument("canonical_line_graph: r must be non-negative");
  SymplecticOpd op = identity_op(3);
  for (int m = 0; m < 3; ++m) op = compose(embed(squeezer(-r), {m}, 3), op);
  op = compose(embed(cz_gate(g), {0, 1}, 3), op);
  op = compose(embed(cz_gate(g), {1, 2}, 3), op);
  return op;
}

SymplecticOpd graph_symplectic(const GraphSpec& spec) {
  validate(spec);
  const int n = static_cast<int>(spec.adjacency.rows());
  const double r = spec.initial_squeezing;
  Matd shear = Matd::Identity(2 * n, 2 * n);
  shear.bottomLeftCorner(n, n) = spec.adjacency;
  Matd squeeze = Matd::Zero(2 * n, 2 * n);
  squeeze.topLeftCorner(n, n) = std::exp(r) * Matd::Identity(n, n);
  squeeze.bottomRightCorner(n, n) = std::exp(-r) * Matd::Identity(n, n);
  return reorder(SymplecticOpd{shear * squeeze, Ordering::XXPP}, Ordering::XPXP);
}

GraphSpec line_graph_spec(double r, double g) {
  Matd a = Matd::Zero(3, 3);
  a(0, 1) = a(1, 0) = g;
  a(1, 2) = a(2, 1) = g;
  return {a, r};
}

GraphSpec triangle_graph_spec(double r, double g) {
  Matd a = Matd::Constant(3, 3, g);
  a.diagonal().setZero();
  return {a, r};
}

std::vector<double> nullifier_variances(const GraphSpec& spec, const CovMatrixd& cm) {
  validate(spec);
  const int n = static_cast<int>(spec.adjacency.rows());
  if (cm.modes() != n) throw std::invalid_argument("nullifier_variances: mode count mismatch");
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    Vecd w = Vecd::Zero(2 * n);
    w(quad_index(i, Quadrature::P, n, cm.ordering)) = 1.0;
    for (int j = 0; j < n; ++j) w(quad_index(j, Quadrature::X, n, cm.ordering)) -= spec.adjacency(i, j);
    out.push_back(w.dot(cm.entries * w));
  }
  return out;
}

namespace {

void fix_sign(Eigen::Ref<Vecd> v) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (v(k) < 0) v = -v;
}

}  // namespace

BlochMessiah bloch_messiah(const SymplecticOpd& target) {
  if (symplectic_defect(target) > 1e-8)
    throw std::invalid_argument("bloch_messiah: target is not symplectic");
  const int n = target.modes();
  const SymplecticOpd t = reorder(target, Ordering::XXPP);
  const Matd gamma = t.matrix * t.matrix.transpose();
  const Matd j = omega<double>(n, Ordering::XXPP);

  Eigen::SelfAdjointEigenSolver<Matd> es(gamma);
  const Vecd& lam = es.eigenvalues();
  const Matd& vec = es.eigenvectors();

  // Pair every direction with variance >= 1 with its conjugate J^T u; the
  // unit-variance subspace needs an explicit symplectic Gram-Schmidt.
  std::vector<int> order(2 * n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return lam(a) > lam(b); });

  Matd u(2 * n, n);
  std::vector<double> var;
  int filled = 0;
  const double tol = 1e-9;
  std::vector<Vecd> unit_space;
  for (int idx : order) {
    if (filled == n) break;
    if (lam(idx) > 1.0 + tol) {
      Vecd v = vec.col(idx);
      fix_sign(v);
      u.col(filled) = v;
      var.push_back(lam(idx));
      ++filled;
    } else if (lam(idx) > 1.0 - tol) {
      unit_space.push_back(vec.col(idx));
    }
  }
  for (std::size_t k = 0; k < unit_space.size() && filled < n; ++k) {
    Vecd v = unit_space[k];
    for (int c = 0; c < filled; ++c) {
      v -= u.col(c).dot(v) * u.col(c);
      const Vecd jc = j.transpose() * u.col(c);
      v -= jc.dot(v) * jc;
    }
    if (v.norm() < 1e-6) continue;
    v.normalize();
    fix_sign(v);
    u.col(filled) = v;
    var.push_back(1.0);
    ++filled;
  }
  if (filled != n) throw std::runtime_error("bloch_messiah: could not complete the symplectic basis");

  Matd o(2 * n, 2 * n);
  o.leftCols(n) = u;
  o.rightCols(n) = j.transpose() * u;

  BlochMessiah bm;
  bm.passive = reorder(SymplecticOpd{o, Ordering::XXPP}, Ordering::XPXP);
  // Mode k of the squeezer layer feeds column k of the passive part.
  for (double v : var) bm.squeezers.push_back(0.5 * std::log(v));
  return bm;
}

SymplecticOpd bloch_messiah_matrix(const BlochMessiah& bm) {
  const int n = static_cast<int>(bm.squeezers.size());
  SymplecticOpd layer = identity_op(n);
  for (int k = 0; k < n; ++k) layer = compose(embed(squeezer(-bm.squeezers[k]), {k}, n), layer);
  return compose(bm.passive, layer);
}

double line_graph_max_squeezer(double r, double g) {
  const double base = (2.0 * g * g + 1.0) * std::exp(2.0 * r) + std::exp(-2.0 * r);
  return std::log(0.5 * (std::sqrt(base - 2.0) + std::sqrt(base + 2.0)));
}

double budget_solve(double r, const SqueezeBudget& budget) {
  if (budget.r_max < 0.0) throw std::invalid_argument("budget_solve: r_max must be non-negative");
  if (r < 0.0 || r > budget.r_max + 1e-12)
    throw std::invalid_argument("budget_solve: r must lie in [0, r_max]");
  // The max squeezer satisfies e^{2 r_B} + e^{-2 r_B} = (2g^2+1) e^{2r} + e^{-2r}.
  const double x = std::exp(2.0 * budget.r_max) + std::exp(-2.0 * budget.r_max);
  const double v = (x - std::exp(-2.0 * r)) * std::exp(-2.0 * r);
  return std::sqrt(std::max(0.5 * (v - 1.0), 0.0));
}

double db_to_r(double db) { return db * std::numbers::ln10 / 20.0; }

double r_to_db(double r) { return r * 20.0 / std::numbers::ln10; }

}  // namespace cvqss
