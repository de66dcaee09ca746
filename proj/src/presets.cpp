#include "blockprox/presets.hpp"

#include <algorithm>
#include <cmath>

#include "blockprox/errors.hpp"
#include "blockprox/rng.hpp"

namespace blockprox {

namespace {
constexpr std::uint64_t kQuadDataSeed = 0x51ad0bb5u;
constexpr std::uint64_t kLowRankDataSeed = 0x10c4a22fu;
}  // namespace

QuadraticLeastSquares::QuadraticLeastSquares(Matrix q, std::vector<double> b,
                                             BlockPartition partition,
                                             std::span<const double> x0)
    : q_(std::move(q)), b_(std::move(b)), partition_(std::move(partition)),
      x_(x0.begin(), x0.end()) {
  if (q_.cols() != partition_.dimension() || b_.size() != q_.rows() ||
      x_.size() != q_.cols()) {
    throw UsageError("QuadraticLeastSquares: inconsistent dimensions");
  }
  residual_.assign(q_.rows(), 0.0);
  for (std::size_t row = 0; row < q_.rows(); ++row) {
    double acc = -b_[row];
    for (std::size_t col = 0; col < q_.cols(); ++col) acc += q_.at(row, col) * x_[col];
    residual_[row] = acc;
  }
}

double QuadraticLeastSquares::eval(std::span<const double>) {
  double s = 0.0;
  for (double r : residual_) s += r * r;
  return 0.5 * s;
}

void QuadraticLeastSquares::block_grad(std::span<const double>, std::size_t i,
                                       std::span<double> out) {
  const std::size_t off = partition_.offset(i);
  for (std::size_t t = 0; t < out.size(); ++t) {
    const auto col = q_.col(off + t);
    double acc = 0.0;
    for (std::size_t row = 0; row < col.size(); ++row) acc += col[row] * residual_[row];
    out[t] = acc;
  }
}

double QuadraticLeastSquares::shifted_residual_sq(std::size_t i, std::span<const double> s,
                                                  bool write) {
  const std::size_t off = partition_.offset(i);
  double sq = 0.0;
  for (std::size_t row = 0; row < q_.rows(); ++row) {
    double shift = 0.0;
    for (std::size_t t = 0; t < s.size(); ++t) shift += q_.at(row, off + t) * s[t];
    const double cand = residual_[row] + shift;
    sq += cand * cand;
    if (write) residual_[row] = cand;
  }
  return sq;
}

double QuadraticLeastSquares::eval_candidate(std::span<const double>, std::size_t i,
                                             std::span<const double> s) {
  return 0.5 * shifted_residual_sq(i, s, false);
}

void QuadraticLeastSquares::commit_block(std::span<const double>, std::size_t i,
                                         std::span<const double> new_block) {
  const std::size_t off = partition_.offset(i);
  std::vector<double> delta(new_block.size());
  for (std::size_t t = 0; t < new_block.size(); ++t) delta[t] = new_block[t] - x_[off + t];
  shifted_residual_sq(i, delta, true);
  for (std::size_t t = 0; t < new_block.size(); ++t) x_[off + t] = new_block[t];
  // Rebuild the residual from the committed point once per sweep to bound
  // incremental rounding.
  if (++commits_ % partition_.dimension() == 0) {
    for (std::size_t row = 0; row < q_.rows(); ++row) {
      double acc = -b_[row];
      for (std::size_t col = 0; col < q_.cols(); ++col) acc += q_.at(row, col) * x_[col];
      residual_[row] = acc;
    }
  }
}

QuadL1Instance make_quad_l1_instance() {
  constexpr std::size_t n = 20;
  Xoshiro256 rng(kQuadDataSeed);
  QuadL1Instance inst;
  inst.q = Matrix(n, n);
  // Dominant diagonal keeps Q^T Q well conditioned, so both the reference and
  // the randomized solver converge tightly.
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) {
      inst.q.at(r, c) = (rng.uniform01() - 0.5) + (r == c ? 4.0 : 0.0);
    }
  }
  inst.b.resize(n);
  for (double& v : inst.b) v = 2.0 * rng.uniform01() - 1.0;
  inst.mu = 0.1;
  return inst;
}

Matrix make_lowrank_target() {
  constexpr std::size_t m = 20, n = 20, rank = 3;
  Xoshiro256 rng(kLowRankDataSeed);
  Matrix w(rank, m), h(rank, n);
  for (double& v : w.flat()) v = rng.uniform01();
  for (double& v : h.flat()) v = rng.uniform01();
  Matrix a(m, n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < m; ++r) {
      double dot = 0.0;
      for (std::size_t t = 0; t < rank; ++t) dot += w.at(t, r) * h.at(t, c);
      a.at(r, c) = dot;
    }
  }
  return a;
}

ReferenceResult reference_prox_gradient_l1(const Matrix& q, std::span<const double> b,
                                           double mu, double step_tol,
                                           std::uint64_t max_iters) {
  const std::size_t n = q.cols();
  const std::size_t m = q.rows();

  // lambda_max(Q^T Q) by power iteration.
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n))), qv(m), qtqv(n);
  double lam = 1.0;
  for (int it = 0; it < 500; ++it) {
    for (std::size_t row = 0; row < m; ++row) {
      double acc = 0.0;
      for (std::size_t col = 0; col < n; ++col) acc += q.at(row, col) * v[col];
      qv[row] = acc;
    }
    for (std::size_t col = 0; col < n; ++col) {
      double acc = 0.0;
      for (std::size_t row = 0; row < m; ++row) acc += q.at(row, col) * qv[row];
      qtqv[col] = acc;
    }
    double nrm = 0.0;
    for (double t : qtqv) nrm += t * t;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) break;
    lam = nrm;
    for (std::size_t col = 0; col < n; ++col) v[col] = qtqv[col] / nrm;
  }
  const double step = 1.0 / lam;

  std::vector<double> x(n, 0.0), grad(n), res(m);
  ReferenceResult out;
  for (std::uint64_t it = 0; it < max_iters; ++it) {
    for (std::size_t row = 0; row < m; ++row) {
      double acc = -b[row];
      for (std::size_t col = 0; col < n; ++col) acc += q.at(row, col) * x[col];
      res[row] = acc;
    }
    for (std::size_t col = 0; col < n; ++col) {
      double acc = 0.0;
      for (std::size_t row = 0; row < m; ++row) acc += q.at(row, col) * res[row];
      grad[col] = acc;
    }
    double move = 0.0;
    const double cut = step * mu;
    for (std::size_t col = 0; col < n; ++col) {
      const double y = x[col] - step * grad[col];
      const double soft = std::abs(y) > cut ? (y > 0.0 ? y - cut : y + cut) : 0.0;
      move = std::max(move, std::abs(soft - x[col]));
      x[col] = soft;
    }
    out.iterations = it + 1;
    if (move <= step_tol) break;
  }

  double sq = 0.0;
  for (std::size_t row = 0; row < m; ++row) {
    double acc = -b[row];
    for (std::size_t col = 0; col < n; ++col) acc += q.at(row, col) * x[col];
    sq += acc * acc;
  }
  double l1 = 0.0;
  for (double t : x) l1 += std::abs(t);
  out.phi = 0.5 * sq + mu * l1;
  out.x = std::move(x);
  return out;
}

}  // namespace blockprox
