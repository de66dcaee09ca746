#ifndef BLOCKPROX_NMF_HPP_
#define BLOCKPROX_NMF_HPP_

#include <cstdint>
#include <utility>

#include "blockprox/dense.hpp"
#include "blockprox/kernels.hpp"
#include "blockprox/problem.hpp"
#include "blockprox/rng.hpp"

namespace blockprox {

/// Factorization model f(U, V) = 1/2 ||A - U^T V||_F^2 over the m+n blocks
/// given by the columns of U (p x m) and V (p x n), exposed to the solver as
/// a SmoothOracle over the flattened point [U columns | V columns].
///
/// A residual cache R = A - U^T V and its squared norm are maintained
/// incrementally: updating column j of U touches exactly row j of R (cost
/// O(pn)), column j of V touches column j (cost O(pm)). Probe and commit share
/// one arithmetic path, so the value after a commit equals the probe that
/// preceded it bit for bit. Every refresh_cadence commits the cache is
/// recomputed from scratch, bounding the incremental drift.
class NmfProblem final : public SmoothOracle {
 public:
  /// refresh_cadence 0 selects the default of one sweep (m + n commits).
  NmfProblem(Matrix A, std::size_t rank, Matrix U0, Matrix V0,
             kernels::ExecPolicy policy = kernels::ExecPolicy::kSerial,
             std::size_t refresh_cadence = 0);

  // SmoothOracle. The oracle tracks the committed factors itself; the x spans
  // are only checked for dimension.
  double eval(std::span<const double> x) override;
  void block_grad(std::span<const double> x, std::size_t i, std::span<double> out) override;
  double eval_candidate(std::span<const double> x, std::size_t i,
                        std::span<const double> s) override;
  void commit_block(std::span<const double> x, std::size_t i,
                    std::span<const double> new_block) override;

  /// 1/2 ||R||_F^2 from the cache.
  double value() const { return 0.5 * residual_sq_; }

  /// Column j of -V (A^T - V^T U), i.e. -V R(j,:)^T. Cost O(pn).
  void grad_u_col(std::size_t j, std::span<double> out) const;
  /// Column j of -U (A - U^T V), i.e. -U R(:,j). Cost O(pm).
  void grad_v_col(std::size_t j, std::span<double> out) const;

  /// f after adding s to column j of U (resp. V), without committing.
  double probe_u_col(std::size_t j, std::span<const double> s);
  double probe_v_col(std::size_t j, std::span<const double> s);

  void commit_u_col(std::size_t j, std::span<const double> new_col);
  void commit_v_col(std::size_t j, std::span<const double> new_col);

  const Matrix& target() const { return A_; }
  const Matrix& factor_u() const { return U_; }
  const Matrix& factor_v() const { return V_; }
  std::size_t rank() const { return p_; }
  std::size_t refresh_cadence() const { return cadence_; }
  std::uint64_t refresh_count() const { return refreshes_; }
  /// Largest |cached - recomputed| / (1 + ||A||_F^2) observed at a refresh.
  double max_refresh_drift() const { return max_drift_; }
  double target_sq_norm() const { return target_sq_norm_; }

  /// Partition with m+n blocks of size p (U columns first, then V columns).
  BlockPartition partition() const;
  /// Flattened committed point matching partition(): U columns then V columns.
  std::vector<double> flatten() const;

  static BlockPartition make_partition(std::size_t m, std::size_t n, std::size_t p);

 private:
  struct RetargetSums {
    double old_sq = 0.0;
    double new_sq = 0.0;
  };
  RetargetSums retarget_u_row(std::size_t j, std::span<const double> s, bool write);
  RetargetSums retarget_v_col(std::size_t j, std::span<const double> s, bool write);
  void refresh();
  void after_commit();

  Matrix A_, U_, V_, R_;
  std::size_t p_;
  double residual_sq_ = 0.0;
  double target_sq_norm_ = 0.0;
  kernels::ExecPolicy policy_;
  std::size_t cadence_;
  std::uint64_t commits_since_refresh_ = 0;
  std::uint64_t refreshes_ = 0;
  double max_drift_ = 0.0;
  std::vector<double> delta_scratch_;
};

/// Factors with entries uniform in [0, 1), filled U first then V, both in
/// column-major order, from the given stream.
std::pair<Matrix, Matrix> init_uniform(Xoshiro256& rng, std::size_t m, std::size_t n,
                                       std::size_t p);

/// Peak signal-to-noise: 20 log10(max_pixel) - 10 log10(MSE) with
/// MSE = ||A - U^T V||_F^2 / (m n); +inf on exact reconstruction.
double psnr(const Matrix& A, const Matrix& U, const Matrix& V, double max_pixel,
            kernels::ExecPolicy policy = kernels::ExecPolicy::kSerial);

}  // namespace blockprox

#endif  // BLOCKPROX_NMF_HPP_
