#include "cvqss/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace cvqss {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finaliser applied to the combined key.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SampleBatch sample_rounds(const CovMatrixd& cm, const std::vector<QuadSel>& assignment, long count,
                          std::uint64_t seed, int workers) {
  if (assignment.empty()) throw std::invalid_argument("sample_rounds: empty quadrature assignment");
  if (count < 0) throw std::invalid_argument("sample_rounds: negative sample count");
  const int n = cm.modes();
  std::vector<int> idx;
  for (QuadSel s : assignment) {
    if (s.mode < 0 || s.mode >= n) throw std::invalid_argument("sample_rounds: mode out of range");
    idx.push_back(quad_index(s.mode, s.quad, n, cm.ordering));
  }
  const Matd reduced = select<double>(cm.entries, idx, idx);
  Eigen::LLT<Matd> llt(reduced);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("sample_rounds: reduced covariance is not positive definite");
  const Matd lower = llt.matrixL();
  const int k = static_cast<int>(idx.size());

  SampleBatch batch;
  batch.seed = seed;
  batch.count = count;
  batch.outcomes.resize(count, k);
  const long chunks = (count + kSampleChunk - 1) / kSampleChunk;

  auto run_chunk = [&](long c) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    std::normal_distribution<double> normal(0.0, 1.0);
    const long begin = c * kSampleChunk;
    const long end = std::min(count, begin + kSampleChunk);
    Vecd z(k);
    for (long i = begin; i < end; ++i) {
      for (int j = 0; j < k; ++j) z(j) = normal(rng);
      batch.outcomes.row(i) = (lower * z).transpose();
    }
  };

  workers = std::max(1, workers);
  if (workers == 1 || chunks <= 1) {
    for (long c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (long c = w; c < chunks; c += workers) run_chunk(c);
      });
    for (auto& t : pool) t.join();
  }
  return batch;
}

namespace {

struct Accumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
  }
  double mean(double n) const { return sum / n; }
  double se(double n) const {
    const double m = sum / n;
    return std::sqrt(std::max(sum_sq / n - m * m, 0.0) / n);
  }
};

}  // namespace

EmpiricalMoments empirical_moments(const SampleBatch& batch, int trusted, int partner, const BinGrid& grid,
                                   double a) {
  if (batch.count <= 1) throw std::invalid_argument("empirical_moments: at least two samples are required");
  Accumulator d, d2, va, vb;
  for (long i = 0; i < batch.count; ++i) {
    const double ia = grid.index(grid.locate(a * batch.outcomes(i, trusted)));
    const double ib = grid.index(grid.locate(batch.outcomes(i, partner)));
    const double dist = std::abs(ia - ib);
    d.add(dist);
    d2.add(dist * dist);
    va.add(ia * ia);
    vb.add(ib * ib);
  }
  const double n = static_cast<double>(batch.count);
  EmpiricalMoments out;
  out.value = {d.mean(n), d2.mean(n), va.mean(n), vb.mean(n), a};
  out.std_error = {d.se(n), d2.se(n), va.se(n), vb.se(n), 0.0};
  return out;
}

Regression regress(const SampleBatch& batch, int x_col, int y_col) {
  if (batch.count <= 2) throw std::invalid_argument("regress: at least three samples are required");
  const auto x = batch.outcomes.col(x_col);
  const auto y = batch.outcomes.col(y_col);
  const double n = static_cast<double>(batch.count);
  // Zero-mean model: the states carry no displacement.
  const double sxx = x.squaredNorm();
  const double sxy = x.dot(y);
  Regression r;
  r.slope = sxy / sxx;
  const Vecd resid = y - r.slope * x;
  r.residual_variance = resid.squaredNorm() / (n - 1.0);
  r.slope_se = std::sqrt(r.residual_variance / sxx);
  const double m4 = resid.array().pow(4).mean();
  r.residual_variance_se = std::sqrt(std::max(m4 - r.residual_variance * r.residual_variance, 0.0) / n);
  return r;
}

}  // namespace cvqss
