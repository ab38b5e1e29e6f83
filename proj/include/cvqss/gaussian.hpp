#pragma once

// Covariance-matrix algebra for multimode Gaussian states.
// Units: vacuum quadrature variance is 1. Canonical ordering is XPXP.

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cvqss {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matd = Mat<double>;
using Vecd = Vec<double>;

enum class Ordering { XPXP, XXPP };
enum class Quadrature { X = 0, P = 1 };

template <typename Scalar>
struct CovMatrix {
  Mat<Scalar> entries;
  Ordering ordering = Ordering::XPXP;
  std::vector<std::string> labels;

  int modes() const { return static_cast<int>(entries.rows() / 2); }
};

template <typename Scalar>
struct MeanVector {
  Vec<Scalar> entries;
  Ordering ordering = Ordering::XPXP;
};

template <typename Scalar>
struct SymplecticOp {
  Mat<Scalar> matrix;
  Ordering ordering = Ordering::XPXP;

  int modes() const { return static_cast<int>(matrix.rows() / 2); }
};

using CovMatrixd = CovMatrix<double>;
using MeanVectord = MeanVector<double>;
using SymplecticOpd = SymplecticOp<double>;

// Index of quadrature q of mode i in a 2N vector.
inline int quad_index(int mode, Quadrature q, int n, Ordering ord) {
  const int qi = static_cast<int>(q);
  return ord == Ordering::XPXP ? 2 * mode + qi : qi * n + mode;
}

template <typename Scalar = double>
Mat<Scalar> omega(int n, Ordering ord = Ordering::XPXP) {
  Mat<Scalar> w = Mat<Scalar>::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    const int x = quad_index(i, Quadrature::X, n, ord);
    const int p = quad_index(i, Quadrature::P, n, ord);
    w(x, p) = Scalar(1);
    w(p, x) = Scalar(-1);
  }
  return w;
}

template <typename Scalar = double>
std::vector<std::string> default_labels(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("m" + std::to_string(i));
  return out;
}

template <typename Scalar = double>
CovMatrix<Scalar> vacuum(int n, std::vector<std::string> labels = {}) {
  if (labels.empty()) labels = default_labels(n);
  return {Mat<Scalar>::Identity(2 * n, 2 * n), Ordering::XPXP, std::move(labels)};
}

template <typename Scalar = double>
CovMatrix<Scalar> thermal(Scalar v, std::string label = "m0") {
  return {Mat<Scalar>::Identity(2, 2) * v, Ordering::XPXP, {std::move(label)}};
}

template <typename Scalar = double>
SymplecticOp<Scalar> identity_op(int n) {
  return {Mat<Scalar>::Identity(2 * n, 2 * n), Ordering::XPXP};
}

template <typename Scalar = double>
SymplecticOp<Scalar> squeezer(Scalar r) {
  Mat<Scalar> s = Mat<Scalar>::Zero(2, 2);
  s(0, 0) = std::exp(-r);
  s(1, 1) = std::exp(r);
  return {s, Ordering::XPXP};
}

template <typename Scalar = double>
SymplecticOp<Scalar> beamsplitter(Scalar t) {
  if (!(t >= Scalar(0) && t <= Scalar(1)))
    throw std::invalid_argument("beamsplitter: transmission must lie in [0,1]");
  const Scalar a = std::sqrt(t);
  const Scalar b = std::sqrt(Scalar(1) - t);
  Mat<Scalar> s = Mat<Scalar>::Zero(4, 4);
  s.topLeftCorner(2, 2) = a * Mat<Scalar>::Identity(2, 2);
  s.topRightCorner(2, 2) = b * Mat<Scalar>::Identity(2, 2);
  s.bottomLeftCorner(2, 2) = -b * Mat<Scalar>::Identity(2, 2);
  s.bottomRightCorner(2, 2) = a * Mat<Scalar>::Identity(2, 2);
  return {s, Ordering::XPXP};
}

// Order (x1, p1, x2, p2); x of each mode shifts p of the other.
template <typename Scalar = double>
SymplecticOp<Scalar> cz_gate(Scalar g) {
  Mat<Scalar> s = Mat<Scalar>::Identity(4, 4);
  s(1, 2) = g;
  s(3, 0) = g;
  return {s, Ordering::XPXP};
}

template <typename Scalar>
SymplecticOp<Scalar> embed(const SymplecticOp<Scalar>& op, const std::vector<int>& targets,
                           int total_modes) {
  if (op.ordering != Ordering::XPXP)
    throw std::invalid_argument("embed: operation must be in XPXP ordering");
  if (static_cast<int>(targets.size()) != op.modes())
    throw std::invalid_argument("embed: target count does not match operation arity");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= total_modes)
      throw std::invalid_argument("embed: target mode out of range");
    for (std::size_t j = 0; j < i; ++j)
      if (targets[i] == targets[j]) throw std::invalid_argument("embed: repeated target mode");
  }
  Mat<Scalar> out = Mat<Scalar>::Identity(2 * total_modes, 2 * total_modes);
  const int k = static_cast<int>(targets.size());
  for (int a = 0; a < 2 * k; ++a)
    for (int b = 0; b < 2 * k; ++b)
      out(2 * targets[a / 2] + a % 2, 2 * targets[b / 2] + b % 2) = op.matrix(a, b);
  return {out, Ordering::XPXP};
}

// Product a*b, i.e. b is applied first.
template <typename Scalar>
SymplecticOp<Scalar> compose(const SymplecticOp<Scalar>& a, const SymplecticOp<Scalar>& b) {
  if (a.ordering != b.ordering || a.matrix.rows() != b.matrix.rows())
    throw std::invalid_argument("compose: dimension or ordering mismatch");
  return {a.matrix * b.matrix, a.ordering};
}

template <typename Scalar>
Scalar symplectic_defect(const SymplecticOp<Scalar>& op) {
  const Mat<Scalar> w = omega<Scalar>(op.modes(), op.ordering);
  return (op.matrix * w * op.matrix.transpose() - w).cwiseAbs().maxCoeff();
}

template <typename Scalar>
CovMatrix<Scalar> evolve(const CovMatrix<Scalar>& cm, const SymplecticOp<Scalar>& op) {
  if (cm.entries.rows() != op.matrix.rows() || cm.ordering != op.ordering)
    throw std::invalid_argument("evolve: dimension or ordering mismatch");
  return {op.matrix * cm.entries * op.matrix.transpose(), cm.ordering, cm.labels};
}

template <typename Scalar>
std::pair<CovMatrix<Scalar>, MeanVector<Scalar>> evolve(const CovMatrix<Scalar>& cm,
                                                        const MeanVector<Scalar>& mean,
                                                        const SymplecticOp<Scalar>& op) {
  if (mean.entries.size() != cm.entries.rows() || mean.ordering != cm.ordering)
    throw std::invalid_argument("evolve: mean vector does not match covariance matrix");
  return {evolve(cm, op), MeanVector<Scalar>{op.matrix * mean.entries, mean.ordering}};
}

// Smallest eigenvalue of the Hermitian matrix cm + i*Omega.
template <typename Scalar>
Scalar physicality_margin(const CovMatrix<Scalar>& cm) {
  using C = std::complex<Scalar>;
  const int n = cm.modes();
  Mat<C> h = cm.entries.template cast<C>() + C(0, 1) * omega<Scalar>(n, cm.ordering).template cast<C>();
  Eigen::SelfAdjointEigenSolver<Mat<C>> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

template <typename Scalar>
std::vector<int> permutation_to(int n, Ordering from, Ordering to) {
  std::vector<int> perm(2 * n);
  for (int i = 0; i < n; ++i)
    for (Quadrature q : {Quadrature::X, Quadrature::P})
      perm[quad_index(i, q, n, to)] = quad_index(i, q, n, from);
  return perm;
}

template <typename Scalar>
CovMatrix<Scalar> reorder(const CovMatrix<Scalar>& cm, Ordering to) {
  const int n = cm.modes();
  const auto perm = permutation_to<Scalar>(n, cm.ordering, to);
  Mat<Scalar> out(2 * n, 2 * n);
  for (int a = 0; a < 2 * n; ++a)
    for (int b = 0; b < 2 * n; ++b) out(a, b) = cm.entries(perm[a], perm[b]);
  return {out, to, cm.labels};
}

template <typename Scalar>
SymplecticOp<Scalar> reorder(const SymplecticOp<Scalar>& op, Ordering to) {
  CovMatrix<Scalar> tmp{op.matrix, op.ordering, {}};
  tmp.labels.resize(op.modes());
  return {reorder(tmp, to).entries, to};
}

template <typename Scalar>
std::vector<int> quad_positions(const std::vector<int>& modes, int n, Ordering ord) {
  std::vector<int> pos;
  if (ord == Ordering::XPXP) {
    for (int m : modes) {
      pos.push_back(quad_index(m, Quadrature::X, n, ord));
      pos.push_back(quad_index(m, Quadrature::P, n, ord));
    }
  } else {
    for (Quadrature q : {Quadrature::X, Quadrature::P})
      for (int m : modes) pos.push_back(quad_index(m, q, n, ord));
  }
  return pos;
}

template <typename Scalar>
Mat<Scalar> select(const Mat<Scalar>& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  Mat<Scalar> out(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b) out(a, b) = m(rows[a], cols[b]);
  return out;
}

template <typename Scalar>
CovMatrix<Scalar> partial_trace(const CovMatrix<Scalar>& cm, const std::vector<int>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  const int n = cm.modes();
  for (int k : keep)
    if (k < 0 || k >= n) throw std::invalid_argument("partial_trace: mode index out of range");
  const auto pos = quad_positions<Scalar>(keep, n, cm.ordering);
  std::vector<std::string> labels;
  for (int k : keep) labels.push_back(cm.labels.empty() ? "m" + std::to_string(k) : cm.labels[k]);
  return {select<Scalar>(cm.entries, pos, pos), cm.ordering, labels};
}

template <typename Scalar>
Mat<Scalar> pseudo_inverse(const Mat<Scalar>& m, Scalar rel_tol = Scalar(1e-12)) {
  Eigen::JacobiSVD<Mat<Scalar>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return Mat<Scalar>::Zero(m.cols(), m.rows());
  const Scalar cut = rel_tol * s(0);
  Vec<Scalar> inv = Vec<Scalar>::Zero(s.size());
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > cut) inv(i) = Scalar(1) / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

template <typename Scalar>
struct Conditioned {
  CovMatrix<Scalar> cm;
  MeanVector<Scalar> mean;
  // Conditional mean = mean + gain * (outcome - measured mean).
  Vec<Scalar> gain;
};

// Homodyne measurement of one quadrature of one mode; the measured mode is removed.
template <typename Scalar>
Conditioned<Scalar> condition_homodyne_full(const CovMatrix<Scalar>& cm, const MeanVector<Scalar>& mean,
                                            int mode, Quadrature q, Scalar outcome) {
  const int n = cm.modes();
  if (mode < 0 || mode >= n) throw std::invalid_argument("condition_homodyne: mode out of range");
  if (mean.entries.size() != cm.entries.rows())
    throw std::invalid_argument("condition_homodyne: mean vector does not match covariance matrix");
  std::vector<int> rest_modes;
  for (int i = 0; i < n; ++i)
    if (i != mode) rest_modes.push_back(i);
  const auto rest = quad_positions<Scalar>(rest_modes, n, cm.ordering);
  const auto meas = quad_positions<Scalar>({mode}, n, cm.ordering);
  const Mat<Scalar> a = select<Scalar>(cm.entries, rest, rest);
  const Mat<Scalar> c = select<Scalar>(cm.entries, rest, meas);
  Mat<Scalar> b = select<Scalar>(cm.entries, meas, meas);
  // Project onto the measured quadrature before inverting.
  Mat<Scalar> proj = Mat<Scalar>::Zero(2, 2);
  proj(static_cast<int>(q), static_cast<int>(q)) = Scalar(1);
  const Mat<Scalar> bmp = pseudo_inverse<Scalar>(proj * b * proj);
  const Mat<Scalar> k = c * bmp;
  Vec<Scalar> m(2);
  m.setZero();
  m(static_cast<int>(q)) = outcome;
  Vec<Scalar> rm = Vec<Scalar>::Zero(rest.size());
  for (std::size_t i = 0; i < rest.size(); ++i) rm(i) = mean.entries(rest[i]);
  Vec<Scalar> rb(2);
  for (int i = 0; i < 2; ++i) rb(i) = mean.entries(meas[i]);
  rb = proj * rb;
  std::vector<std::string> labels;
  for (int i : rest_modes) labels.push_back(cm.labels.empty() ? "m" + std::to_string(i) : cm.labels[i]);
  Conditioned<Scalar> out;
  out.cm = {a - k * c.transpose(), cm.ordering, labels};
  out.mean = {rm + k * (m - rb), cm.ordering};
  out.gain = k.col(static_cast<int>(q));
  return out;
}

template <typename Scalar>
std::pair<CovMatrix<Scalar>, MeanVector<Scalar>> condition_homodyne(const CovMatrix<Scalar>& cm,
                                                                    const MeanVector<Scalar>& mean,
                                                                    int mode, Quadrature q,
                                                                    Scalar outcome) {
  auto c = condition_homodyne_full(cm, mean, mode, q, outcome);
  return {std::move(c.cm), std::move(c.mean)};
}

template <typename Scalar>
CovMatrix<Scalar> condition_homodyne(const CovMatrix<Scalar>& cm, int mode, Quadrature q) {
  MeanVector<Scalar> zero{Vec<Scalar>::Zero(cm.entries.rows()), cm.ordering};
  return condition_homodyne_full(cm, zero, mode, q, Scalar(0)).cm;
}

// Heterodyne (both quadratures, one extra unit of shot noise) on one mode.
template <typename Scalar>
CovMatrix<Scalar> condition_heterodyne(const CovMatrix<Scalar>& cm, int mode) {
  const int n = cm.modes();
  if (mode < 0 || mode >= n) throw std::invalid_argument("condition_heterodyne: mode out of range");
  std::vector<int> rest_modes;
  for (int i = 0; i < n; ++i)
    if (i != mode) rest_modes.push_back(i);
  const auto rest = quad_positions<Scalar>(rest_modes, n, cm.ordering);
  const auto meas = quad_positions<Scalar>({mode}, n, cm.ordering);
  const Mat<Scalar> a = select<Scalar>(cm.entries, rest, rest);
  const Mat<Scalar> c = select<Scalar>(cm.entries, rest, meas);
  const Mat<Scalar> b = select<Scalar>(cm.entries, meas, meas) + Mat<Scalar>::Identity(2, 2);
  std::vector<std::string> labels;
  for (int i : rest_modes) labels.push_back(cm.labels.empty() ? "m" + std::to_string(i) : cm.labels[i]);
  return {a - c * b.inverse() * c.transpose(), cm.ordering, labels};
}

template <typename Scalar>
std::vector<Scalar> symplectic_eigenvalues(const CovMatrix<Scalar>& cm, Scalar tol = Scalar(1e-9)) {
  const int n = cm.modes();
  const Mat<Scalar> m = omega<Scalar>(n, cm.ordering) * cm.entries;
  Eigen::EigenSolver<Mat<Scalar>> es(m, false);
  std::vector<Scalar> mags;
  for (int i = 0; i < es.eigenvalues().size(); ++i) mags.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(mags.begin(), mags.end());
  std::vector<Scalar> out;
  for (int i = 0; i < n; ++i) {
    const Scalar lam = Scalar(0.5) * (mags[2 * i] + mags[2 * i + 1]);
    if (lam < Scalar(1) - tol)
      throw std::domain_error("symplectic_eigenvalues: state violates the uncertainty principle");
    out.push_back(lam);
  }
  return out;
}

template <typename Scalar>
Scalar entropy_g(Scalar x) {
  if (x <= Scalar(1) + Scalar(1e-12)) return Scalar(0);
  const Scalar a = (x + Scalar(1)) / Scalar(2);
  const Scalar b = (x - Scalar(1)) / Scalar(2);
  return a * std::log2(a) - b * std::log2(b);
}

template <typename Scalar>
Scalar von_neumann_entropy(const CovMatrix<Scalar>& cm) {
  Scalar s(0);
  for (Scalar lam : symplectic_eigenvalues(cm)) s += entropy_g(lam);
  return s;
}

template <typename Scalar>
CovMatrix<Scalar> direct_sum(const CovMatrix<Scalar>& a, const CovMatrix<Scalar>& b) {
  if (a.ordering != Ordering::XPXP || b.ordering != Ordering::XPXP)
    throw std::invalid_argument("direct_sum: XPXP ordering required");
  const int na = a.entries.rows();
  const int nb = b.entries.rows();
  Mat<Scalar> out = Mat<Scalar>::Zero(na + nb, na + nb);
  out.topLeftCorner(na, na) = a.entries;
  out.bottomRightCorner(nb, nb) = b.entries;
  auto labels = a.labels;
  labels.insert(labels.end(), b.labels.begin(), b.labels.end());
  return {out, Ordering::XPXP, labels};
}

}  // namespace cvqss
