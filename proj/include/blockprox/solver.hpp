#ifndef BLOCKPROX_SOLVER_HPP_
#define BLOCKPROX_SOLVER_HPP_

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "blockprox/problem.hpp"
#include "blockprox/rng.hpp"

namespace blockprox {

/// Rule producing the trial proximal stepsize for each iteration's
/// backtracking loop.
enum class TrialStrategy {
  kFixed,         // constant trial_init
  kDecreasing,    // last accepted stepsize
  kSelfAdaptive,  // last accepted, grown by 1/beta after a no-backtrack accept
};

enum class TerminationReason {
  kResidualTolerance,
  kMaxIterations,
  kStationaryDirection,
};

const char* to_string(TerminationReason r);

struct SolverConfig {
  double tau_lo = 1e-8;               // smallest admissible trial stepsize
  double tau_hi = 1e8;                // largest admissible trial stepsize
  double sufficient_decrease = 1e-4;  // a in the acceptance test phi(x+d) <= phi(x) - a||d||^2
  double boost_decrease = 0.1;        // alpha in the boost test
  double tau_backtrack = 0.9;         // beta, stepsize shrink factor
  double boost_backtrack = 0.5;       // rho, boost shrink factor
  double boost_trial_init = 3.0;      // initial boost trial (>= 1)
  double boost_trial_growth = 2.0;    // growth factor after a first-attempt boost accept (> 1)
  std::size_t monotone_window = 0;    // M: accept against max of last M+1 values; 0 = monotone
  std::vector<double> block_probs;    // sampling distribution; empty = uniform
  TrialStrategy trial_strategy = TrialStrategy::kSelfAdaptive;
  double trial_init = 2.0;            // fixed value / initial trial, in [tau_lo, tau_hi]
  bool boost_enabled = false;
  std::uint64_t seed = 0;
  std::uint64_t max_iters = 1'500'000;
  double rel_tol = 1e-4;              // relative residual stopping tolerance
  std::size_t residual_window = 0;    // W: compare phi(x^{k-W}) vs phi(x^k); 0 disables the rule
  std::size_t max_backtracks = 2000;  // guard against inconsistent oracles
  double zero_dir_tol = 1e-15;        // ||d_i|| <= tol*(1+||x_i||) counts as a zero direction
  std::size_t trace_stride = 1;       // record every stride-th iteration; 0 = no trace

  /// Throws UsageError when a parameter is out of range or the sampling
  /// distribution is malformed for `block_count` blocks.
  void validate(std::size_t block_count) const;
};

struct IterationRecord {
  std::uint64_t k = 0;
  std::uint32_t block = 0;
  double tau = 0.0;                // accepted stepsize (last tried, on a zero direction)
  std::uint32_t backtracks = 0;    // number of shrink steps; tau = trial * beta^backtracks
  double lambda = 0.0;             // boost extrapolation; 0 when boost is off or failed
  std::uint32_t boost_attempts = 0;
  double phi = 0.0;                // objective after the iteration
  double dir_norm = 0.0;           // ||d_i|| at exit
  std::uint64_t elapsed_ns = 0;

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct SolveResult {
  std::vector<double> x;
  double phi = 0.0;
  std::uint64_t iterations = 0;
  TerminationReason reason = TerminationReason::kMaxIterations;
  std::vector<IterationRecord> trace;
};

// ---------------------------------------------------------------------------
// Components, exposed for direct testing; the solver drives the same code.
// ---------------------------------------------------------------------------

/// Prefix sums of the sampling distribution. Validates positivity and that
/// the probabilities sum to 1 within 1e-12; empty input means uniform.
std::vector<double> cumulative_probs(std::span<const double> probs, std::size_t block_count);

/// Inverse-CDF selection: first index i with u < cumulative[i].
std::size_t pick_block(double u, std::span<const double> cumulative);

/// Trial stepsize for the next iteration. `prev_accepted`/`prev_trial` come
/// from the last accepted iteration (`has_prev` false until one exists).
/// The raw strategy value is then clamped into [tau_lo, min(tau_hi, threshold_i)],
/// staying strictly below a finite prox-boundedness threshold.
double trial_tau(TrialStrategy strategy, bool has_prev, double prev_accepted,
                 double prev_trial, const SolverConfig& cfg, double threshold_i);

/// Acceptance baseline: max of the last min(M+1, size) objective values
/// (monotone for M = 0). `history` is ordered oldest to newest.
double nonmonotone_reference(std::span<const double> history, std::size_t monotone_window);

/// Next boost trial: grown after a first-attempt success, otherwise reset to
/// max(initial, last accepted).
double self_adaptive_sigma(double sigma, double sigma_bar, const SolverConfig& cfg);

/// (1 + lambda^2) / (1 + lambda)^2, the fraction of the combined decrease
/// retained when the accepted step is (1+lambda) d; >= 1/2 for lambda >= 0.
inline double sufficient_decrease_ratio(double lambda) {
  return (1.0 + lambda * lambda) / ((1.0 + lambda) * (1.0 + lambda));
}

/// Scratch buffers reused across iterations.
struct SolverWorkspace {
  std::vector<double> grad, z, candidate, direction, boost_candidate, boost_shift;
  void resize(std::size_t block_len);
};

struct ProxGradStep {
  std::vector<double> candidate;  // prox_{tau g_i}(x_i - tau grad_i)
  std::vector<double> direction;  // candidate - x_i
};

/// One proximal gradient step on block i at stepsize tau (no acceptance test).
ProxGradStep prox_grad_direction(const Problem& p, std::span<const double> x,
                                 std::size_t i, double tau);

struct BacktrackResult {
  bool stationary = false;
  double tau = 0.0;
  std::uint32_t backtracks = 0;
  double dir_norm = 0.0;
  double dir_sq = 0.0;
  // Valid when !stationary; block values live in ws.candidate / ws.direction.
  double cand_phi = 0.0, cand_f = 0.0, cand_g = 0.0;
};

/// Backtracking loop: shrink tau by beta until the prox direction satisfies
/// phi(x+d) <= reference - a ||d||^2, or the direction vanishes. Candidate
/// objective values are composed from single-block probes:
/// phi(x) + [g_i(x_i+d_i) - g_i(x_i)] + [f(x+U_i d_i) - f(x)].
/// Throws SolverError after max_backtracks reductions.
BacktrackResult backtrack(const Problem& p, std::span<const double> x, std::size_t i,
                          double tau_bar, double phi_cur, double f_cur, double g_block_cur,
                          double nmls_reference, const SolverConfig& cfg, SolverWorkspace& ws);

struct BoostResult {
  double lambda = 0.0;
  double sigma = 1.0;  // final sigma (trial on first-attempt success, 1 on failure)
  std::uint32_t attempts = 0;
  bool boosted = false;  // accepted block values live in ws.boost_candidate
  double phi = 0.0, f = 0.0, g = 0.0;
};

/// Extrapolation search along d beyond the accepted point x_hat = x + d:
/// tries sigma, rho*sigma, ... while sigma > 1, accepting the first sigma with
/// phi(x + sigma d) <= phi(x_hat) - alpha (sigma-1)^2 ||d||^2. Probes landing
/// outside dom g fail the test. Returns lambda = 0 (point x_hat) when no
/// sigma > 1 qualifies, which always satisfies the contract.
BoostResult boosted_linesearch(const Problem& p, std::span<const double> x, std::size_t i,
                               std::span<const double> d, double dir_sq, double phi_hat,
                               double f_hat, double g_hat, double phi_cur, double f_cur,
                               double g_block_cur, double sigma_bar, const SolverConfig& cfg,
                               SolverWorkspace& ws);

/// Test instrumentation: everything one iteration decided, delivered before
/// the block is committed (x_before still holds the old point).
struct StepDebug {
  std::span<const double> x_before;
  std::size_t block = 0;
  double trial = 0.0;
  double nmls_reference = 0.0;
  double phi_before = 0.0, f_before = 0.0, g_block_before = 0.0;
  double sigma_bar = 1.0;
  const BacktrackResult* backtrack = nullptr;
  const BoostResult* boost = nullptr;  // null when boost did not run
  std::span<const double> direction;   // empty on a zero-direction exit
  std::span<const double> committed;   // empty on a zero-direction exit
  const IterationRecord* record = nullptr;
};

class StepObserver {
 public:
  virtual ~StepObserver() = default;
  virtual void on_step(const StepDebug& info) = 0;
};

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

/// Randomized block proximal gradient solver with adaptive stepsizes and
/// optional boosted linesearch. One instance owns one point and drives one
/// oracle; instances with disjoint problems can run concurrently.
///
/// Randomness: a single xoshiro256++ stream, one uniform draw per iteration
/// (the block sample), nothing else consumes draws. The objective is tracked
/// by composing accepted probe values, so the recorded phi sequence is exactly
/// nonincreasing in monotone mode; oracle cache refreshes flow into later
/// probe deltas and keep the bookkeeping within the oracle's drift tolerance.
class Solver {
 public:
  Solver(const Problem& p, SolverConfig cfg, std::vector<double> x0);
  Solver(const Problem& p, SolverConfig cfg, std::vector<double> x0, Xoshiro256 rng);

  /// One iteration: sample a block, backtrack, optionally boost, commit.
  IterationRecord step();

  /// Iterate until the relative residual over the configured window drops to
  /// rel_tol, every block is verifiably stationary, or max_iters is reached.
  SolveResult run();

  std::span<const double> point() const { return x_; }
  double phi() const { return phi_; }
  std::uint64_t iteration() const { return k_; }
  double stopping_scale() const { return scale_; }

  void set_observer(StepObserver* obs) { observer_ = obs; }

 private:
  bool all_blocks_stationary();

  const Problem& problem_;
  SolverConfig cfg_;
  std::vector<double> x_;
  Xoshiro256 rng_;
  std::vector<double> cum_probs_;

  double phi_ = 0.0;    // tracked objective at x_
  double f_ = 0.0;      // tracked smooth value at x_
  std::vector<double> g_blocks_;  // per-block regularizer values at x_

  std::uint64_t k_ = 0;
  bool has_accepted_ = false;
  double prev_accepted_tau_ = 0.0;
  double prev_trial_tau_ = 0.0;
  double sigma_bar_;
  std::size_t consecutive_stationary_ = 0;

  std::deque<double> phi_window_;       // last M+1 objective values
  std::deque<double> residual_window_;  // last W+1 objective values
  double scale_ = 1.0;

  SolverWorkspace ws_;
  std::vector<double> history_scratch_;
  StepObserver* observer_ = nullptr;
};

}  // namespace blockprox

#endif  // BLOCKPROX_SOLVER_HPP_
