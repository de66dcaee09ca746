#ifndef BLOCKPROX_PROX_HPP_
#define BLOCKPROX_PROX_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "blockprox/block_partition.hpp"
#include "blockprox/problem.hpp"

namespace blockprox {

// ---------------------------------------------------------------------------
// Closed-form proximal maps, per coordinate. tau must be positive.
// ---------------------------------------------------------------------------

/// Projection onto the nonnegative orthant (prox of the indicator of R_+^n).
inline void prox_nonneg(std::span<const double> z, double /*tau*/, std::span<double> out) {
  for (std::size_t j = 0; j < z.size(); ++j) out[j] = std::max(z[j], 0.0);
}

/// Soft threshold: prox of mu * ||.||_1.
inline void prox_l1(std::span<const double> z, double tau, double mu, std::span<double> out) {
  const double t = tau * mu;
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double a = std::abs(z[j]) - t;
    out[j] = a > 0.0 ? (z[j] > 0.0 ? a : -a) : 0.0;
  }
}

/// Hard threshold: prox of mu * ||.||_0. Multi-valued at z^2 = 2 tau mu; the
/// tie goes to 0, which keeps traces reproducible and matches lsc selection.
inline void prox_l0(std::span<const double> z, double tau, double mu, std::span<double> out) {
  const double cut = 2.0 * tau * mu;
  for (std::size_t j = 0; j < z.size(); ++j) out[j] = (z[j] * z[j] > cut) ? z[j] : 0.0;
}

/// Clamp into [lo, hi] (prox of a box indicator).
inline void prox_box(std::span<const double> z, double /*tau*/, std::span<const double> lo,
                     std::span<const double> hi, std::span<double> out) {
  for (std::size_t j = 0; j < z.size(); ++j) out[j] = std::clamp(z[j], lo[j], hi[j]);
}

// ---------------------------------------------------------------------------
// Regularizers
// ---------------------------------------------------------------------------

/// g = indicator of the nonnegative orthant, blockwise.
class NonnegIndicator final : public SeparableRegularizer {
 public:
  ExtendedReal eval_block(std::size_t, std::span<const double> xi) const override {
    for (double v : xi) {
      if (v < 0.0) return ExtendedReal::infinity();
    }
    return 0.0;
  }
  void prox_block(std::size_t, std::span<const double> z, double tau,
                  std::span<double> out) const override {
    prox_nonneg(z, tau, out);
  }
};

/// g = indicator of a box [lo, hi], either one scalar pair for every
/// coordinate or full per-coordinate bound vectors.
class BoxIndicator final : public SeparableRegularizer {
 public:
  BoxIndicator(double lo, double hi) : scalar_lo_(lo), scalar_hi_(hi) {
    if (!(lo <= hi)) throw UsageError("BoxIndicator: need lo <= hi");
  }
  BoxIndicator(const BlockPartition& partition, std::vector<double> lo, std::vector<double> hi)
      : offsets_(partition.block_count()), lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.size() != partition.dimension() || hi_.size() != partition.dimension()) {
      throw UsageError("BoxIndicator: bound vectors must cover the full dimension");
    }
    for (std::size_t j = 0; j < lo_.size(); ++j) {
      if (!(lo_[j] <= hi_[j])) throw UsageError("BoxIndicator: need lo <= hi");
    }
    for (std::size_t i = 0; i < partition.block_count(); ++i) offsets_[i] = partition.offset(i);
  }

  ExtendedReal eval_block(std::size_t i, std::span<const double> xi) const override {
    for (std::size_t t = 0; t < xi.size(); ++t) {
      const auto [lo, hi] = bounds(i, t);
      if (xi[t] < lo || xi[t] > hi) return ExtendedReal::infinity();
    }
    return 0.0;
  }
  void prox_block(std::size_t i, std::span<const double> z, double,
                  std::span<double> out) const override {
    for (std::size_t t = 0; t < z.size(); ++t) {
      const auto [lo, hi] = bounds(i, t);
      out[t] = std::clamp(z[t], lo, hi);
    }
  }

 private:
  std::pair<double, double> bounds(std::size_t i, std::size_t t) const {
    if (lo_.empty()) return {scalar_lo_, scalar_hi_};
    const std::size_t j = offsets_[i] + t;
    return {lo_[j], hi_[j]};
  }
  double scalar_lo_ = 0.0, scalar_hi_ = 0.0;
  std::vector<std::size_t> offsets_;
  std::vector<double> lo_, hi_;
};

/// g = mu * ||.||_1 (convex; weight mu >= 0).
class L1Penalty final : public SeparableRegularizer {
 public:
  explicit L1Penalty(double mu) : mu_(mu) {
    if (mu < 0.0) throw UsageError("L1Penalty: weight must be nonnegative");
  }
  ExtendedReal eval_block(std::size_t, std::span<const double> xi) const override {
    double s = 0.0;
    for (double v : xi) s += std::abs(v);
    return mu_ * s;
  }
  void prox_block(std::size_t, std::span<const double> z, double tau,
                  std::span<double> out) const override {
    prox_l1(z, tau, mu_, out);
  }
  double weight() const { return mu_; }

 private:
  double mu_;
};

/// g = mu * (number of nonzeros). Nonconvex but bounded below, so the
/// prox-boundedness threshold is still +inf.
class L0Penalty final : public SeparableRegularizer {
 public:
  explicit L0Penalty(double mu) : mu_(mu) {
    if (mu <= 0.0) throw UsageError("L0Penalty: weight must be positive");
  }
  ExtendedReal eval_block(std::size_t, std::span<const double> xi) const override {
    double s = 0.0;
    for (double v : xi) {
      if (v != 0.0) s += mu_;
    }
    return s;
  }
  void prox_block(std::size_t, std::span<const double> z, double tau,
                  std::span<double> out) const override {
    prox_l0(z, tau, mu_, out);
  }
  double weight() const { return mu_; }

 private:
  double mu_;
};

}  // namespace blockprox

#endif  // BLOCKPROX_PROX_HPP_
