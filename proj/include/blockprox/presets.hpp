#ifndef BLOCKPROX_PRESETS_HPP_
#define BLOCKPROX_PRESETS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "blockprox/dense.hpp"
#include "blockprox/problem.hpp"

namespace blockprox {

/// f(x) = 1/2 ||Q x - b||^2 with a cached residual r = Q x - b, updated
/// incrementally on block commits and rebuilt from the committed point every
/// dimension() commits.
class QuadraticLeastSquares final : public SmoothOracle {
 public:
  QuadraticLeastSquares(Matrix q, std::vector<double> b, BlockPartition partition,
                        std::span<const double> x0);

  double eval(std::span<const double> x) override;
  void block_grad(std::span<const double> x, std::size_t i, std::span<double> out) override;
  double eval_candidate(std::span<const double> x, std::size_t i,
                        std::span<const double> s) override;
  void commit_block(std::span<const double> x, std::size_t i,
                    std::span<const double> new_block) override;

  const BlockPartition& partition() const { return partition_; }

 private:
  double shifted_residual_sq(std::size_t i, std::span<const double> s, bool write);

  Matrix q_;
  std::vector<double> b_;
  BlockPartition partition_;
  std::vector<double> x_, residual_;
  std::uint64_t commits_ = 0;
};

/// f(x) = 1/4 sum_j x_j^4; block-wise locally (not globally) Lipschitz
/// gradient, the backtracking stress case.
class QuarticOracle final : public SimpleSmoothOracle {
 public:
  explicit QuarticOracle(BlockPartition partition) : SimpleSmoothOracle(std::move(partition)) {}
  double eval(std::span<const double> x) override {
    double s = 0.0;
    for (double v : x) s += 0.25 * v * v * v * v;
    return s;
  }
  void block_grad(std::span<const double> x, std::size_t i, std::span<double> out) override {
    const auto xi = partition().view(x, i);
    for (std::size_t t = 0; t < xi.size(); ++t) out[t] = xi[t] * xi[t] * xi[t];
  }
};

// ---------------------------------------------------------------------------
// Fixed synthetic instances. The data seeds are constants, so every build and
// every run seed sees the same instance; the run seed only drives the solver.
// ---------------------------------------------------------------------------

struct QuadL1Instance {
  Matrix q;               // 20 x 20, well conditioned
  std::vector<double> b;  // length 20
  double mu = 0.1;        // l1 weight
};
QuadL1Instance make_quad_l1_instance();

/// 20 x 20 nonnegative target with an exact rank-3 factorization A = W^T H,
/// so the optimal objective value is 0.
Matrix make_lowrank_target();

struct ReferenceResult {
  std::vector<double> x;
  double phi = 0.0;
  std::uint64_t iterations = 0;
};

/// Self-contained full-vector proximal gradient for
/// min 1/2 ||Q x - b||^2 + mu ||x||_1 with fixed step 1/L,
/// L = lambda_max(Q^T Q) by power iteration. Monotone, no block structure,
/// no shared solver code; used as the convex-sanity oracle.
ReferenceResult reference_prox_gradient_l1(const Matrix& q, std::span<const double> b,
                                           double mu, double step_tol,
                                           std::uint64_t max_iters);

}  // namespace blockprox

#endif  // BLOCKPROX_PRESETS_HPP_
