#include "blockprox/nmf.hpp"

#include <cmath>
#include <limits>

#include "blockprox/errors.hpp"

namespace blockprox {

NmfProblem::NmfProblem(Matrix A, std::size_t rank, Matrix U0, Matrix V0,
                       kernels::ExecPolicy policy, std::size_t refresh_cadence)
    : A_(std::move(A)), U_(std::move(U0)), V_(std::move(V0)), p_(rank), policy_(policy),
      cadence_(refresh_cadence) {
  if (p_ == 0 || A_.rows() == 0 || A_.cols() == 0) {
    throw UsageError("NmfProblem: rank and target dimensions must be positive");
  }
  if (U_.rows() != p_ || U_.cols() != A_.rows() || V_.rows() != p_ || V_.cols() != A_.cols()) {
    throw UsageError("NmfProblem: factor shapes must be p x m and p x n");
  }
  if (cadence_ == 0) cadence_ = A_.rows() + A_.cols();
  delta_scratch_.resize(p_);
  target_sq_norm_ = kernels::sq_frobenius(A_, policy_);
  residual_sq_ = kernels::residual(A_, U_, V_, R_, policy_);
}

BlockPartition NmfProblem::make_partition(std::size_t m, std::size_t n, std::size_t p) {
  return BlockPartition::uniform(m + n, p);
}

BlockPartition NmfProblem::partition() const {
  return make_partition(A_.rows(), A_.cols(), p_);
}

std::vector<double> NmfProblem::flatten() const {
  std::vector<double> x;
  x.reserve(p_ * (A_.rows() + A_.cols()));
  x.insert(x.end(), U_.flat().begin(), U_.flat().end());
  x.insert(x.end(), V_.flat().begin(), V_.flat().end());
  return x;
}

double NmfProblem::eval(std::span<const double> x) {
  if (x.size() != p_ * (A_.rows() + A_.cols())) throw UsageError("NmfProblem: bad point size");
  return value();
}

void NmfProblem::grad_u_col(std::size_t j, std::span<double> out) const {
  const std::size_t n = A_.cols();
  for (std::size_t t = 0; t < p_; ++t) out[t] = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    const double coef = R_.at(j, c);
    const double* vc = V_.col(c).data();
    for (std::size_t t = 0; t < p_; ++t) out[t] -= vc[t] * coef;
  }
}

void NmfProblem::grad_v_col(std::size_t j, std::span<double> out) const {
  const std::size_t m = A_.rows();
  for (std::size_t t = 0; t < p_; ++t) out[t] = 0.0;
  const double* rc = R_.col(j).data();
  for (std::size_t r = 0; r < m; ++r) {
    const double coef = rc[r];
    const double* ur = U_.col(r).data();
    for (std::size_t t = 0; t < p_; ++t) out[t] -= ur[t] * coef;
  }
}

void NmfProblem::block_grad(std::span<const double>, std::size_t i, std::span<double> out) {
  const std::size_t m = A_.rows();
  if (i < m) {
    grad_u_col(i, out);
  } else {
    grad_v_col(i - m, out);
  }
}

// Row j of R after adding s to column j of U is R(j,:) - s^T V. Accumulates
// both squared norms in column order; the probe and the commit call this same
// code, which is what makes probe-then-commit exact to the last bit.
NmfProblem::RetargetSums NmfProblem::retarget_u_row(std::size_t j, std::span<const double> s,
                                                    bool write) {
  const std::size_t n = A_.cols();
  RetargetSums sums;
  for (std::size_t c = 0; c < n; ++c) {
    const double old_val = R_.at(j, c);
    const double* vc = V_.col(c).data();
    double shift = 0.0;
    for (std::size_t t = 0; t < p_; ++t) shift += s[t] * vc[t];
    const double new_val = old_val - shift;
    sums.old_sq += old_val * old_val;
    sums.new_sq += new_val * new_val;
    if (write) R_.at(j, c) = new_val;
  }
  return sums;
}

NmfProblem::RetargetSums NmfProblem::retarget_v_col(std::size_t j, std::span<const double> s,
                                                    bool write) {
  const std::size_t m = A_.rows();
  RetargetSums sums;
  double* rc = R_.col(j).data();
  for (std::size_t r = 0; r < m; ++r) {
    const double old_val = rc[r];
    const double* ur = U_.col(r).data();
    double shift = 0.0;
    for (std::size_t t = 0; t < p_; ++t) shift += s[t] * ur[t];
    const double new_val = old_val - shift;
    sums.old_sq += old_val * old_val;
    sums.new_sq += new_val * new_val;
    if (write) rc[r] = new_val;
  }
  return sums;
}

double NmfProblem::probe_u_col(std::size_t j, std::span<const double> s) {
  const auto sums = retarget_u_row(j, s, false);
  return 0.5 * (residual_sq_ + (sums.new_sq - sums.old_sq));
}

double NmfProblem::probe_v_col(std::size_t j, std::span<const double> s) {
  const auto sums = retarget_v_col(j, s, false);
  return 0.5 * (residual_sq_ + (sums.new_sq - sums.old_sq));
}

double NmfProblem::eval_candidate(std::span<const double>, std::size_t i,
                                  std::span<const double> s) {
  const std::size_t m = A_.rows();
  return i < m ? probe_u_col(i, s) : probe_v_col(i - m, s);
}

void NmfProblem::commit_u_col(std::size_t j, std::span<const double> new_col) {
  auto uj = U_.col(j);
  for (std::size_t t = 0; t < p_; ++t) delta_scratch_[t] = new_col[t] - uj[t];
  const auto sums = retarget_u_row(j, delta_scratch_, true);
  residual_sq_ = residual_sq_ + (sums.new_sq - sums.old_sq);
  for (std::size_t t = 0; t < p_; ++t) uj[t] = new_col[t];
  after_commit();
}

void NmfProblem::commit_v_col(std::size_t j, std::span<const double> new_col) {
  auto vj = V_.col(j);
  for (std::size_t t = 0; t < p_; ++t) delta_scratch_[t] = new_col[t] - vj[t];
  const auto sums = retarget_v_col(j, delta_scratch_, true);
  residual_sq_ = residual_sq_ + (sums.new_sq - sums.old_sq);
  for (std::size_t t = 0; t < p_; ++t) vj[t] = new_col[t];
  after_commit();
}

void NmfProblem::commit_block(std::span<const double>, std::size_t i,
                              std::span<const double> new_block) {
  const std::size_t m = A_.rows();
  if (i < m) {
    commit_u_col(i, new_block);
  } else {
    commit_v_col(i - m, new_block);
  }
}

void NmfProblem::after_commit() {
  if (++commits_since_refresh_ >= cadence_) refresh();
}

void NmfProblem::refresh() {
  const double cached = residual_sq_;
  residual_sq_ = kernels::residual(A_, U_, V_, R_, policy_);
  max_drift_ = std::max(max_drift_, std::abs(cached - residual_sq_) / (1.0 + target_sq_norm_));
  commits_since_refresh_ = 0;
  ++refreshes_;
}

std::pair<Matrix, Matrix> init_uniform(Xoshiro256& rng, std::size_t m, std::size_t n,
                                       std::size_t p) {
  if (p == 0 || m == 0 || n == 0) throw UsageError("init_uniform: dimensions must be positive");
  Matrix U(p, m), V(p, n);
  for (double& v : U.flat()) v = rng.uniform01();
  for (double& v : V.flat()) v = rng.uniform01();
  return {std::move(U), std::move(V)};
}

double psnr(const Matrix& A, const Matrix& U, const Matrix& V, double max_pixel,
            kernels::ExecPolicy policy) {
  if (A.size() == 0) throw UsageError("psnr: empty target");
  const double err = kernels::factorization_sq_error(A, U, V, policy);
  const double mse = err / static_cast<double>(A.rows() * A.cols());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(max_pixel) - 10.0 * std::log10(mse);
}

}  // namespace blockprox
