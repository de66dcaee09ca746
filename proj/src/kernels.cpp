#include "blockprox/kernels.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

#include "blockprox/errors.hpp"

namespace blockprox::kernels {

namespace {

void check_shapes(const Matrix& A, const Matrix& U, const Matrix& V) {
  if (U.rows() != V.rows() || U.cols() != A.rows() || V.cols() != A.cols()) {
    throw UsageError("kernels: factor shapes do not match the target matrix");
  }
}

// Column c of A - U^T V written into out; returns the column's squared norm.
// Shared by the serial and parallel drivers so both produce the same bits.
double residual_col(const Matrix& A, const Matrix& U, const Matrix& V, std::size_t c,
                    double* out) {
  const std::size_t m = A.rows();
  const std::size_t p = U.rows();
  const double* ac = A.col(c).data();
  const double* vc = V.col(c).data();
  double col_sq = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const double* ur = U.col(r).data();
    double dot = 0.0;
    for (std::size_t t = 0; t < p; ++t) dot += ur[t] * vc[t];
    const double res = ac[r] - dot;
    if (out != nullptr) out[r] = res;
    col_sq += res * res;
  }
  return col_sq;
}

double col_sq_norm(const Matrix& M, std::size_t c) {
  double s = 0.0;
  for (double v : M.col(c)) s += v * v;
  return s;
}

void reconstruct_col(const Matrix& U, const Matrix& V, double lo, double hi, std::size_t c,
                     double* out) {
  const std::size_t p = U.rows();
  const double* vc = V.col(c).data();
  for (std::size_t r = 0; r < U.cols(); ++r) {
    const double* ur = U.col(r).data();
    double dot = 0.0;
    for (std::size_t t = 0; t < p; ++t) dot += ur[t] * vc[t];
    out[r] = std::clamp(dot, lo, hi);
  }
}

double sum_in_order(const std::vector<double>& partials) {
  double s = 0.0;
  for (double v : partials) s += v;
  return s;
}

}  // namespace

double residual(const Matrix& A, const Matrix& U, const Matrix& V, Matrix& R,
                ExecPolicy policy) {
  check_shapes(A, U, V);
  if (R.rows() != A.rows() || R.cols() != A.cols()) R = Matrix(A.rows(), A.cols());
  const std::int64_t n = static_cast<std::int64_t>(A.cols());
  std::vector<double> partials(A.cols());
  if (policy == ExecPolicy::kParallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < n; ++c) {
      partials[c] = residual_col(A, U, V, static_cast<std::size_t>(c), R.col(c).data());
    }
  } else {
    for (std::int64_t c = 0; c < n; ++c) {
      partials[c] = residual_col(A, U, V, static_cast<std::size_t>(c), R.col(c).data());
    }
  }
  return sum_in_order(partials);
}

double sq_frobenius(const Matrix& M, ExecPolicy policy) {
  const std::int64_t n = static_cast<std::int64_t>(M.cols());
  std::vector<double> partials(M.cols());
  if (policy == ExecPolicy::kParallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < n; ++c) partials[c] = col_sq_norm(M, static_cast<std::size_t>(c));
  } else {
    for (std::int64_t c = 0; c < n; ++c) partials[c] = col_sq_norm(M, static_cast<std::size_t>(c));
  }
  return sum_in_order(partials);
}

double factorization_sq_error(const Matrix& A, const Matrix& U, const Matrix& V,
                              ExecPolicy policy) {
  check_shapes(A, U, V);
  const std::int64_t n = static_cast<std::int64_t>(A.cols());
  std::vector<double> partials(A.cols());
  if (policy == ExecPolicy::kParallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < n; ++c) {
      partials[c] = residual_col(A, U, V, static_cast<std::size_t>(c), nullptr);
    }
  } else {
    for (std::int64_t c = 0; c < n; ++c) {
      partials[c] = residual_col(A, U, V, static_cast<std::size_t>(c), nullptr);
    }
  }
  return sum_in_order(partials);
}

void reconstruct_clamped(const Matrix& U, const Matrix& V, double lo, double hi,
                         Matrix& out, ExecPolicy policy) {
  if (U.rows() != V.rows()) throw UsageError("kernels: factor ranks differ");
  if (out.rows() != U.cols() || out.cols() != V.cols()) out = Matrix(U.cols(), V.cols());
  const std::int64_t n = static_cast<std::int64_t>(V.cols());
  if (policy == ExecPolicy::kParallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < n; ++c) {
      reconstruct_col(U, V, lo, hi, static_cast<std::size_t>(c), out.col(c).data());
    }
  } else {
    for (std::int64_t c = 0; c < n; ++c) {
      reconstruct_col(U, V, lo, hi, static_cast<std::size_t>(c), out.col(c).data());
    }
  }
}

}  // namespace blockprox::kernels
