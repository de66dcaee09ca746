#ifndef BLOCKPROX_PROBLEM_HPP_
#define BLOCKPROX_PROBLEM_HPP_

#include <limits>
#include <span>
#include <vector>

#include "blockprox/block_partition.hpp"
#include "blockprox/extended_real.hpp"

namespace blockprox {

/// Smooth part f of the composite objective f + g. The solver owns the
/// current point x and drives the oracle sequentially:
///
///   eval(x)                value of f at the committed point
///   block_grad(x, i, out)  partial gradient of block i at the committed point
///   eval_candidate(x,i,s)  f(x + U_i s) without committing, for linesearch probes
///   commit_block(x,i,new)  block i is about to change to `new_block`; x still
///                          holds the old values, so cached oracles can update
///                          incrementally
///
/// eval and block_grad are functions of the committed point only. Implementations
/// with incremental caches must keep eval() consistent with the probes they
/// answered, up to their documented drift tolerance.
class SmoothOracle {
 public:
  virtual ~SmoothOracle() = default;
  virtual double eval(std::span<const double> x) = 0;
  virtual void block_grad(std::span<const double> x, std::size_t i,
                          std::span<double> out) = 0;
  virtual double eval_candidate(std::span<const double> x, std::size_t i,
                                std::span<const double> s) = 0;
  virtual void commit_block(std::span<const double> x, std::size_t i,
                            std::span<const double> new_block) = 0;
};

/// Stateless oracle base: probes materialize x + U_i s and call eval, commits
/// are no-ops. Fine for cheap test functions; real applications override.
class SimpleSmoothOracle : public SmoothOracle {
 public:
  explicit SimpleSmoothOracle(BlockPartition partition) : partition_(std::move(partition)) {}

  double eval_candidate(std::span<const double> x, std::size_t i,
                        std::span<const double> s) override {
    scratch_.assign(x.begin(), x.end());
    auto xi = partition_.view(std::span<double>(scratch_), i);
    for (std::size_t t = 0; t < s.size(); ++t) xi[t] += s[t];
    return eval(scratch_);
  }

  void commit_block(std::span<const double>, std::size_t, std::span<const double>) override {}

  const BlockPartition& partition() const { return partition_; }

 private:
  BlockPartition partition_;
  std::vector<double> scratch_;
};

/// Separable nonsmooth part g = sum_i g_i. Each g_i must be proper, lsc and
/// prox-bounded; prox_block is only called with tau strictly below threshold(i).
/// Where the prox is multi-valued the implementation documents which element
/// it returns. Implementations are stateless and safe for concurrent use.
class SeparableRegularizer {
 public:
  virtual ~SeparableRegularizer() = default;
  virtual ExtendedReal eval_block(std::size_t i, std::span<const double> xi) const = 0;
  virtual void prox_block(std::size_t i, std::span<const double> z, double tau,
                          std::span<double> out) const = 0;
  /// Prox-boundedness threshold of g_i; +inf for functions bounded below.
  virtual double threshold(std::size_t) const {
    return std::numeric_limits<double>::infinity();
  }
};

/// Composite problem handed to the solver. Non-owning; the caller keeps the
/// oracle and regularizer alive and gives each solver instance exclusive use
/// of its oracle.
struct Problem {
  const BlockPartition* partition = nullptr;
  SmoothOracle* smooth = nullptr;
  const SeparableRegularizer* regularizer = nullptr;
  /// Scale for the relative-residual stopping rule; <= 0 means use
  /// max(1, |phi(x0)|).
  double stopping_scale = 0.0;
};

/// phi(x) = f(x) + sum_i g_i(x_i); +inf as soon as any block leaves dom g_i.
inline ExtendedReal objective(const Problem& p, std::span<const double> x) {
  if (x.size() != p.partition->dimension()) {
    throw UsageError("objective: dimension mismatch");
  }
  ExtendedReal g_total = 0.0;
  for (std::size_t i = 0; i < p.partition->block_count(); ++i) {
    g_total += p.regularizer->eval_block(i, p.partition->view(x, i));
    if (!g_total.is_finite()) return ExtendedReal::infinity();
  }
  return g_total + ExtendedReal(p.smooth->eval(x));
}

}  // namespace blockprox

#endif  // BLOCKPROX_PROBLEM_HPP_
