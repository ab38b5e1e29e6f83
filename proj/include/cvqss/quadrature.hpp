#pragma once

// Adaptive Gauss-Kronrod (7/15) integration of vector-valued integrands.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace cvqss {

namespace gk {

inline constexpr std::array<double, 8> kNodes{0.991455371120812639206854697526329,
                                               0.949107912342758524526189684047851,
                                               0.864864423359769072789712788640926,
                                               0.741531185599394439863864773280788,
                                               0.586087235467691130294144845693013,
                                               0.405845151377397166906606412076961,
                                               0.207784955007898467600689403773245,
                                               0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrod{0.022935322010529224963732008058970,
                                                0.063092092629978553290700663189204,
                                                0.104790010322250183839876322541518,
                                                0.140653259715525918745189590510238,
                                                0.169004726639267902826583426598550,
                                                0.190350578064785409913256402421014,
                                                0.204432940075298892414161999234649,
                                                0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGauss{0.129484966168869693270611432679082,
                                              0.279705391489276667901467771423780,
                                              0.381830050505118944950369775488975,
                                              0.417959183673469387755102040816327};

}  // namespace gk

template <typename F>
void gk15(F& f, double a, double b, Eigen::VectorXd& kron, Eigen::VectorXd& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  Eigen::VectorXd fc = f(c);
  kron = gk::kKronrod[7] * fc;
  Eigen::VectorXd gauss = gk::kGauss[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * gk::kNodes[i];
    Eigen::VectorXd s = f(c - dx) + f(c + dx);
    kron += gk::kKronrod[i] * s;
    if (i % 2 == 1) gauss += gk::kGauss[i / 2] * s;
  }
  kron *= h;
  gauss *= h;
  err = (kron - gauss).cwiseAbs();
}

// Integrates f: double -> VectorXd over [a, b] until every component's error
// estimate sums below abs_tol.
template <typename F>
Eigen::VectorXd integrate_adaptive(F f, double a, double b, double abs_tol, int max_intervals = 2000) {
  struct Piece {
    double a, b;
    Eigen::VectorXd value, err;
    double worst;
    bool operator<(const Piece& o) const { return worst < o.worst; }
  };
  std::priority_queue<Piece> heap;
  Eigen::VectorXd v, e;
  gk15(f, a, b, v, e);
  Eigen::VectorXd total = v;
  Eigen::VectorXd total_err = e;
  heap.push({a, b, v, e, e.maxCoeff()});
  int intervals = 1;
  while (total_err.maxCoeff() > abs_tol && intervals < max_intervals) {
    Piece p = heap.top();
    heap.pop();
    total -= p.value;
    total_err -= p.err;
    const double mid = 0.5 * (p.a + p.b);
    for (auto [lo, hi] : {std::pair{p.a, mid}, std::pair{mid, p.b}}) {
      gk15(f, lo, hi, v, e);
      total += v;
      total_err += e;
      heap.push({lo, hi, v, e, e.maxCoeff()});
    }
    ++intervals;
  }
  return total;
}

}  // namespace cvqss
