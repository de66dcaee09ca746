#ifndef BLOCKPROX_KERNELS_HPP_
#define BLOCKPROX_KERNELS_HPP_

#include "blockprox/dense.hpp"

namespace blockprox::kernels {

/// Kernel execution policy. Parallel variants split work by output column and
/// reduce per-column partial sums serially in index order, so serial and
/// parallel runs produce bit-identical results for any thread count; the
/// serial variants are the reference the tests compare against.
enum class ExecPolicy { kSerial, kParallel };

/// R = A - U^T V and ||R||_F^2. U is p x m, V is p x n, A and R are m x n.
double residual(const Matrix& A, const Matrix& U, const Matrix& V, Matrix& R,
                ExecPolicy policy);

/// ||M||_F^2 with deterministic column-ordered accumulation.
double sq_frobenius(const Matrix& M, ExecPolicy policy);

/// ||A - U^T V||_F^2 without materializing the residual.
double factorization_sq_error(const Matrix& A, const Matrix& U, const Matrix& V,
                              ExecPolicy policy);

/// out = clamp(U^T V, lo, hi), the reconstruction written to image output.
void reconstruct_clamped(const Matrix& U, const Matrix& V, double lo, double hi,
                         Matrix& out, ExecPolicy policy);

}  // namespace blockprox::kernels

#endif  // BLOCKPROX_KERNELS_HPP_
