#ifndef BLOCKPROX_EXPERIMENT_HPP_
#define BLOCKPROX_EXPERIMENT_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "blockprox/solver.hpp"

namespace blockprox {

/// rnbpg: nonmonotone acceptance (window M = 10), no boost.
/// arbpg: monotone, no boost. arbpg-b: monotone with boosted linesearch.
enum class Method { kRnbpg, kArbpg, kArbpgBoost };

Method parse_method(const std::string& s);
const char* to_string(Method m);
TrialStrategy parse_strategy(const std::string& s);
const char* to_string(TrialStrategy s);

struct RunSpec {
  std::string input_png;  // set exactly one of input_png / preset
  std::string preset;
  std::size_t rank = 0;
  Method method = Method::kArbpg;
  std::optional<TrialStrategy> strategy;  // default: adaptive (quartic-1d: fixed)
  std::uint64_t seed = 0;
  double rel_tol = 1e-4;
  std::uint64_t max_iters = 1'500'000;
  std::string out_dir;  // empty = write no artifacts
  std::uint64_t trace_stride = 1000;
  int jobs = 1;
  bool save_factors = false;
  /// Real wall times in JSON/CSV artifacts; off keeps repeated runs
  /// byte-identical (stdout always shows measured times).
  bool timing_in_artifacts = false;
  bool parallel_kernels = true;
  std::optional<std::size_t> residual_window;  // default: 2(m+n) for factorizations
  std::optional<double> trial_init;            // default: 2 (quartic-1d: 1e8)
  std::optional<std::uint64_t> monotone_window_override;  // tests only
};

struct ChannelResult {
  std::string name;
  std::uint64_t iterations = 0;
  double time_s = 0.0;
  double phi_final = 0.0;
  double psnr_db = 0.0;  // NaN when no reconstruction target exists
  TerminationReason termination = TerminationReason::kMaxIterations;
  std::vector<IterationRecord> trace;
};

struct RunSummary {
  std::string input_label;
  Method method = Method::kArbpg;
  TrialStrategy strategy = TrialStrategy::kSelfAdaptive;
  std::uint64_t seed = 0;
  std::vector<ChannelResult> channels;
  double avg_iterations = 0.0;
  double avg_time_s = 0.0;
  double avg_phi = 0.0;
  double avg_psnr = 0.0;
  SolverConfig config_used;
  std::map<std::string, double> extras;
  std::vector<std::string> artifacts;
};

/// Per-channel factorization of a PNG: seeded init, solve, reconstruction,
/// PSNR, artifacts (summary.json, trace_ch*.csv, recon.png, factors_ch*.bin).
RunSummary run_experiment(const RunSpec& spec);

/// Synthetic problems: "lowrank-exact", "quad-l1", "quartic-1d".
RunSummary run_preset(const RunSpec& spec);

/// Dispatch on input_png vs preset.
RunSummary run(const RunSpec& spec);

/// Runs every spec (>= 2, same input) and renders one row per spec.
std::vector<RunSummary> compare_runs(const std::vector<RunSpec>& specs);
std::string compare_table(const std::vector<RunSummary>& summaries);

nlohmann::json summary_json(const RunSummary& summary, bool include_timing);
std::string summary_table(const RunSummary& summary);

}  // namespace blockprox

#endif  // BLOCKPROX_EXPERIMENT_HPP_
