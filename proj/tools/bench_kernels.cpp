// Times the serial reference kernels against the OpenMP variants on
// factorization shapes like the ones the image runs use, and checks that both
// produce identical bits.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "blockprox/dense.hpp"
#include "blockprox/kernels.hpp"
#include "blockprox/rng.hpp"

namespace {

using blockprox::Matrix;
using blockprox::Xoshiro256;
namespace kn = blockprox::kernels;

Matrix random_matrix(Xoshiro256& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& v : m.flat()) v = rng.uniform01();
  return m;
}

template <typename F>
double time_best_of(int reps, F&& fn) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    best = std::min(best, s);
  }
  return best;
}

void bench_shape(std::size_t m, std::size_t n, std::size_t p, int reps) {
  Xoshiro256 rng(7);
  const Matrix a = random_matrix(rng, m, n);
  const Matrix u = random_matrix(rng, p, m);
  const Matrix v = random_matrix(rng, p, n);

  Matrix r_serial, r_parallel, recon_serial, recon_parallel;
  double sq_serial = 0.0, sq_parallel = 0.0;

  const double t_res_s =
      time_best_of(reps, [&] { sq_serial = kn::residual(a, u, v, r_serial, kn::ExecPolicy::kSerial); });
  const double t_res_p = time_best_of(
      reps, [&] { sq_parallel = kn::residual(a, u, v, r_parallel, kn::ExecPolicy::kParallel); });
  const double t_rec_s = time_best_of(reps, [&] {
    kn::reconstruct_clamped(u, v, 0.0, 1.0, recon_serial, kn::ExecPolicy::kSerial);
  });
  const double t_rec_p = time_best_of(reps, [&] {
    kn::reconstruct_clamped(u, v, 0.0, 1.0, recon_parallel, kn::ExecPolicy::kParallel);
  });
  double err_s = 0.0, err_p = 0.0;
  const double t_err_s = time_best_of(
      reps, [&] { err_s = kn::factorization_sq_error(a, u, v, kn::ExecPolicy::kSerial); });
  const double t_err_p = time_best_of(
      reps, [&] { err_p = kn::factorization_sq_error(a, u, v, kn::ExecPolicy::kParallel); });

  const bool bitwise_ok =
      sq_serial == sq_parallel && err_s == err_p && r_serial == r_parallel &&
      recon_serial == recon_parallel;

  std::printf("%4zu x %-4zu p=%-4zu | residual %8.3f ms -> %8.3f ms (x%.2f) | "
              "reconstruct %8.3f ms -> %8.3f ms (x%.2f) | sq_error %8.3f ms -> %8.3f ms (x%.2f) | %s\n",
              m, n, p, 1e3 * t_res_s, 1e3 * t_res_p, t_res_s / t_res_p, 1e3 * t_rec_s,
              1e3 * t_rec_p, t_rec_s / t_rec_p, 1e3 * t_err_s, 1e3 * t_err_p, t_err_s / t_err_p,
              bitwise_ok ? "bitwise-equal" : "MISMATCH");
  if (!bitwise_ok) std::exit(1);
}

}  // namespace

int main(int argc, char** argv) {
  int reps = 5;
  if (argc > 1) reps = std::atoi(argv[1]);
#ifdef _OPENMP
  std::printf("OpenMP threads: %d (serial -> parallel, best of %d)\n", omp_get_max_threads(),
              reps);
#else
  std::printf("built without OpenMP; parallel policy falls back to serial\n");
#endif
  bench_shape(192, 256, 100, reps);
  bench_shape(250, 300, 100, reps);
  bench_shape(300, 400, 150, reps);
  bench_shape(48, 64, 20, reps);
  return 0;
}
