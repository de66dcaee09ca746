#include "blockprox/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "blockprox/errors.hpp"
#include "blockprox/factors_io.hpp"
#include "blockprox/image_io.hpp"
#include "blockprox/kernels.hpp"
#include "blockprox/nmf.hpp"
#include "blockprox/presets.hpp"
#include "blockprox/prox.hpp"
#include "blockprox/trace.hpp"

namespace blockprox {

namespace {

namespace fs = std::filesystem;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SolverConfig method_config(const RunSpec& spec, TrialStrategy strategy) {
  SolverConfig cfg;
  switch (spec.method) {
    case Method::kRnbpg:
      cfg.monotone_window = 10;
      cfg.boost_enabled = false;
      break;
    case Method::kArbpg:
      cfg.monotone_window = 0;
      cfg.boost_enabled = false;
      break;
    case Method::kArbpgBoost:
      cfg.monotone_window = 0;
      cfg.boost_enabled = true;
      break;
  }
  if (spec.monotone_window_override) cfg.monotone_window = *spec.monotone_window_override;
  cfg.trial_strategy = strategy;
  if (spec.trial_init) cfg.trial_init = *spec.trial_init;
  cfg.rel_tol = spec.rel_tol;
  cfg.max_iters = spec.max_iters;
  cfg.trace_stride = spec.trace_stride;
  cfg.seed = spec.seed;
  return cfg;
}

std::string label_of(const RunSpec& spec) {
  return spec.preset.empty() ? spec.input_png : spec.preset;
}

void finish_averages(RunSummary& s) {
  if (s.channels.empty()) return;
  double it = 0.0, t = 0.0, phi = 0.0, p = 0.0;
  bool any_psnr = false;
  for (const ChannelResult& c : s.channels) {
    it += static_cast<double>(c.iterations);
    t += c.time_s;
    phi += c.phi_final;
    if (!std::isnan(c.psnr_db)) {
      p += c.psnr_db;
      any_psnr = true;
    }
  }
  const double n = static_cast<double>(s.channels.size());
  s.avg_iterations = it / n;
  s.avg_time_s = t / n;
  s.avg_phi = phi / n;
  s.avg_psnr = any_psnr ? p / n : std::numeric_limits<double>::quiet_NaN();
}

struct ChannelOutput {
  ChannelResult result;
  Matrix recon;
  Matrix u, v;
};

ChannelOutput solve_nmf_channel(const Matrix& a, const RunSpec& spec, const SolverConfig& base,
                                std::size_t channel_index, const std::string& name,
                                double psnr_max_pixel) {
  const std::size_t m = a.rows(), n = a.cols();
  const auto policy = spec.parallel_kernels ? kernels::ExecPolicy::kParallel
                                            : kernels::ExecPolicy::kSerial;

  // One stream per channel: factor init consumes it first (U then V,
  // column-major), then the solver's block sampling continues on it.
  const std::uint64_t channel_seed = derive_stream_seed(spec.seed, channel_index);
  Xoshiro256 rng(channel_seed);
  auto [u0, v0] = init_uniform(rng, m, n, spec.rank);

  NmfProblem oracle(a, spec.rank, std::move(u0), std::move(v0), policy);
  const BlockPartition partition = oracle.partition();
  NonnegIndicator nonneg;
  Problem problem{&partition, &oracle, &nonneg, std::sqrt(oracle.target_sq_norm())};

  SolverConfig cfg = base;
  cfg.seed = channel_seed;
  cfg.residual_window = spec.residual_window ? *spec.residual_window : 2 * (m + n);

  Solver solver(problem, cfg, oracle.flatten(), rng);
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult res = solver.run();
  const double elapsed = seconds_since(t0);

  ChannelOutput out;
  out.result.name = name;
  out.result.iterations = res.iterations;
  out.result.time_s = elapsed;
  out.result.phi_final = res.phi;
  out.result.termination = res.reason;
  out.result.trace = std::move(res.trace);
  out.result.psnr_db = psnr(a, oracle.factor_u(), oracle.factor_v(), psnr_max_pixel, policy);
  kernels::reconstruct_clamped(oracle.factor_u(), oracle.factor_v(), 0.0, 1.0, out.recon,
                               policy);
  out.u = oracle.factor_u();
  out.v = oracle.factor_v();
  return out;
}

void write_summary_artifacts(const RunSummary& summary, const RunSpec& spec) {
  if (spec.out_dir.empty()) return;
  const fs::path dir(spec.out_dir);
  std::ofstream json_out(dir / "summary.json");
  json_out << summary_json(summary, spec.timing_in_artifacts).dump(2) << '\n';
  std::ofstream text_out(dir / "summary.txt");
  text_out << summary_table(summary);
}

}  // namespace

Method parse_method(const std::string& s) {
  if (s == "rnbpg") return Method::kRnbpg;
  if (s == "arbpg") return Method::kArbpg;
  if (s == "arbpg-b") return Method::kArbpgBoost;
  throw UsageError("unknown method '" + s + "' (expected rnbpg|arbpg|arbpg-b)");
}

const char* to_string(Method m) {
  switch (m) {
    case Method::kRnbpg: return "rnbpg";
    case Method::kArbpg: return "arbpg";
    case Method::kArbpgBoost: return "arbpg-b";
  }
  return "unknown";
}

TrialStrategy parse_strategy(const std::string& s) {
  if (s == "fixed") return TrialStrategy::kFixed;
  if (s == "decreasing") return TrialStrategy::kDecreasing;
  if (s == "adaptive") return TrialStrategy::kSelfAdaptive;
  throw UsageError("unknown strategy '" + s + "' (expected fixed|decreasing|adaptive)");
}

const char* to_string(TrialStrategy s) {
  switch (s) {
    case TrialStrategy::kFixed: return "fixed";
    case TrialStrategy::kDecreasing: return "decreasing";
    case TrialStrategy::kSelfAdaptive: return "adaptive";
  }
  return "unknown";
}

RunSummary run_experiment(const RunSpec& spec) {
  if (spec.input_png.empty()) throw UsageError("run_experiment: no input image");
  if (spec.rank == 0) throw UsageError("run_experiment: --rank must be positive");

  const ImageChannels image = load_png(spec.input_png);
  const TrialStrategy strategy = spec.strategy.value_or(TrialStrategy::kSelfAdaptive);
  const SolverConfig base = method_config(spec, strategy);

  RunSummary summary;
  summary.input_label = spec.input_png;
  summary.method = spec.method;
  summary.strategy = strategy;
  summary.seed = spec.seed;
  summary.config_used = base;

  const std::size_t n_channels = image.channels.size();
  std::vector<std::string> names =
      n_channels == 3 ? std::vector<std::string>{"red", "green", "blue"}
                      : std::vector<std::string>{"gray"};

  std::vector<ChannelOutput> outputs(n_channels);
  const int jobs = std::max(1, spec.jobs);
  if (jobs == 1 || n_channels == 1) {
    for (std::size_t c = 0; c < n_channels; ++c) {
      outputs[c] = solve_nmf_channel(image.channels[c], spec, base, c, names[c], 1.0);
    }
  } else {
    std::vector<std::exception_ptr> errors(n_channels);
    std::vector<std::thread> workers;
    std::atomic<std::size_t> next{0};
    const std::size_t thread_count = std::min<std::size_t>(jobs, n_channels);
    for (std::size_t w = 0; w < thread_count; ++w) {
      workers.emplace_back([&] {
        for (std::size_t c = next.fetch_add(1); c < n_channels; c = next.fetch_add(1)) {
          try {
            outputs[c] = solve_nmf_channel(image.channels[c], spec, base, c, names[c], 1.0);
          } catch (...) {
            errors[c] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : workers) t.join();
    for (const auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }

  for (auto& out : outputs) summary.channels.push_back(std::move(out.result));
  finish_averages(summary);

  if (!spec.out_dir.empty()) {
    const fs::path dir(spec.out_dir);
    fs::create_directories(dir);
    ImageChannels recon;
    recon.width = image.width;
    recon.height = image.height;
    recon.max_pixel = image.max_pixel;
    for (std::size_t c = 0; c < n_channels; ++c) recon.channels.push_back(outputs[c].recon);
    const fs::path recon_path = dir / "recon.png";
    write_png(recon_path.string(), recon);
    summary.artifacts.push_back(recon_path.string());

    for (std::size_t c = 0; c < n_channels; ++c) {
      const fs::path trace_path = dir / ("trace_ch" + std::to_string(c) + ".csv");
      std::ofstream os(trace_path);
      write_trace_csv(os, summary.channels[c].trace, spec.timing_in_artifacts);
      summary.artifacts.push_back(trace_path.string());
      if (spec.save_factors) {
        const fs::path fpath = dir / ("factors_ch" + std::to_string(c) + ".bin");
        write_factors(fpath.string(), outputs[c].u, outputs[c].v);
        summary.artifacts.push_back(fpath.string());
      }
    }
    write_summary_artifacts(summary, spec);
  }
  return summary;
}

RunSummary run_preset(const RunSpec& spec) {
  RunSummary summary;
  summary.input_label = spec.preset;
  summary.method = spec.method;
  summary.seed = spec.seed;

  ChannelResult channel;
  channel.name = "preset";
  channel.psnr_db = std::numeric_limits<double>::quiet_NaN();

  if (spec.preset == "lowrank-exact") {
    const TrialStrategy strategy = spec.strategy.value_or(TrialStrategy::kSelfAdaptive);
    summary.strategy = strategy;
    SolverConfig cfg = method_config(spec, strategy);

    const Matrix a = make_lowrank_target();
    const std::size_t m = a.rows(), n = a.cols();
    const auto policy = spec.parallel_kernels ? kernels::ExecPolicy::kParallel
                                              : kernels::ExecPolicy::kSerial;
    const std::uint64_t stream_seed = derive_stream_seed(spec.seed, 0);
    Xoshiro256 rng(stream_seed);
    auto [u0, v0] = init_uniform(rng, m, n, 3);
    NmfProblem oracle(a, 3, std::move(u0), std::move(v0), policy);
    const BlockPartition partition = oracle.partition();
    NonnegIndicator nonneg;
    Problem problem{&partition, &oracle, &nonneg, std::sqrt(oracle.target_sq_norm())};
    cfg.seed = stream_seed;
    cfg.residual_window = spec.residual_window ? *spec.residual_window : 2 * (m + n);
    summary.config_used = cfg;

    Solver solver(problem, cfg, oracle.flatten(), rng);
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res = solver.run();
    channel.time_s = seconds_since(t0);
    channel.iterations = res.iterations;
    channel.phi_final = res.phi;
    channel.termination = res.reason;
    channel.trace = std::move(res.trace);

    double max_entry = 0.0;
    for (double v : a.flat()) max_entry = std::max(max_entry, v);
    channel.psnr_db = psnr(a, oracle.factor_u(), oracle.factor_v(), max_entry, policy);
    summary.extras["target_sq_norm"] = oracle.target_sq_norm();
    summary.extras["phi_rel"] = res.phi / oracle.target_sq_norm();
  } else if (spec.preset == "quad-l1") {
    const TrialStrategy strategy = spec.strategy.value_or(TrialStrategy::kSelfAdaptive);
    summary.strategy = strategy;
    SolverConfig cfg = method_config(spec, strategy);

    const QuadL1Instance inst = make_quad_l1_instance();
    const std::size_t n = inst.q.cols();
    BlockPartition partition = BlockPartition::uniform(n, 1);
    std::vector<double> x0(n, 0.0);
    QuadraticLeastSquares oracle(inst.q, inst.b, partition, x0);
    L1Penalty reg(inst.mu);
    Problem problem{&partition, &oracle, &reg, 0.0};
    cfg.seed = derive_stream_seed(spec.seed, 0);
    cfg.residual_window = spec.residual_window ? *spec.residual_window : 2 * n;
    summary.config_used = cfg;

    Solver solver(problem, cfg, x0);
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res = solver.run();
    channel.time_s = seconds_since(t0);
    channel.iterations = res.iterations;
    channel.phi_final = res.phi;
    channel.termination = res.reason;
    channel.trace = std::move(res.trace);

    const ReferenceResult ref =
        reference_prox_gradient_l1(inst.q, inst.b, inst.mu, 1e-10, 2'000'000);
    summary.extras["reference_phi"] = ref.phi;
    summary.extras["reference_iterations"] = static_cast<double>(ref.iterations);
    summary.extras["reference_gap"] = std::abs(res.phi - ref.phi);
  } else if (spec.preset == "quartic-1d") {
    const TrialStrategy strategy = spec.strategy.value_or(TrialStrategy::kFixed);
    summary.strategy = strategy;
    RunSpec local = spec;
    if (!local.trial_init) local.trial_init = 1e8;  // backtracking from a huge trial
    SolverConfig cfg = method_config(local, strategy);

    BlockPartition partition = BlockPartition::uniform(1, 1);
    QuarticOracle oracle(partition);
    L1Penalty zero_reg(0.0);  // g == 0
    Problem problem{&partition, &oracle, &zero_reg, 0.0};
    cfg.seed = derive_stream_seed(spec.seed, 0);
    cfg.residual_window = spec.residual_window ? *spec.residual_window : 8;
    summary.config_used = cfg;

    Solver solver(problem, cfg, std::vector<double>{3.0});
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res = solver.run();
    channel.time_s = seconds_since(t0);
    channel.iterations = res.iterations;
    channel.phi_final = res.phi;
    channel.termination = res.reason;
    channel.trace = std::move(res.trace);
    summary.extras["final_x"] = res.x[0];
  } else {
    throw UsageError("unknown preset '" + spec.preset + "'");
  }

  summary.channels.push_back(std::move(channel));
  finish_averages(summary);

  if (!spec.out_dir.empty()) {
    const fs::path dir(spec.out_dir);
    fs::create_directories(dir);
    const fs::path trace_path = dir / "trace.csv";
    std::ofstream os(trace_path);
    write_trace_csv(os, summary.channels[0].trace, spec.timing_in_artifacts);
    summary.artifacts.push_back(trace_path.string());
    write_summary_artifacts(summary, spec);
  }
  return summary;
}

RunSummary run(const RunSpec& spec) {
  if (!spec.preset.empty() && !spec.input_png.empty()) {
    throw UsageError("give either an input image or a preset, not both");
  }
  if (!spec.preset.empty()) return run_preset(spec);
  return run_experiment(spec);
}

std::vector<RunSummary> compare_runs(const std::vector<RunSpec>& specs) {
  if (specs.size() < 2) throw UsageError("compare needs at least two specs");
  for (const RunSpec& s : specs) {
    if (label_of(s) != label_of(specs.front())) {
      throw UsageError("compare requires every spec to use the same input");
    }
  }
  std::vector<RunSummary> summaries;
  summaries.reserve(specs.size());
  for (const RunSpec& s : specs) summaries.push_back(run(s));
  return summaries;
}

std::string compare_table(const std::vector<RunSummary>& summaries) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-24s %-8s %-10s %12s %10s %14s\n", "input", "method",
                "strategy", "iterations", "time_s", "phi");
  os << line;
  for (const RunSummary& s : summaries) {
    std::snprintf(line, sizeof(line), "%-24s %-8s %-10s %12.1f %10.2f %14.6g\n",
                  s.input_label.c_str(), to_string(s.method), to_string(s.strategy),
                  s.avg_iterations, s.avg_time_s, s.avg_phi);
    os << line;
  }
  return os.str();
}

namespace {

nlohmann::json psnr_json(double psnr_db) {
  if (std::isnan(psnr_db)) return nullptr;
  if (std::isinf(psnr_db)) return "inf";
  return psnr_db;
}

}  // namespace

nlohmann::json summary_json(const RunSummary& summary, bool include_timing) {
  nlohmann::json channels = nlohmann::json::array();
  for (const ChannelResult& c : summary.channels) {
    channels.push_back({
        {"iterations", c.iterations},
        {"time_s", include_timing ? c.time_s : 0.0},
        {"phi_final", c.phi_final},
        {"psnr_db", psnr_json(c.psnr_db)},
        {"termination", to_string(c.termination)},
    });
  }
  const SolverConfig& cfg = summary.config_used;
  nlohmann::json j{
      {"input", summary.input_label},
      {"method", to_string(summary.method)},
      {"strategy", to_string(summary.strategy)},
      {"seed", summary.seed},
      {"channels", channels},
      {"avg",
       {{"iterations", summary.avg_iterations},
        {"time_s", include_timing ? summary.avg_time_s : 0.0},
        {"phi_final", summary.avg_phi},
        {"psnr_db", psnr_json(summary.avg_psnr)}}},
      {"provenance",
       {{"M", cfg.monotone_window},
        {"boost", cfg.boost_enabled},
        {"tau_lo", cfg.tau_lo},
        {"tau_hi", cfg.tau_hi},
        {"a", cfg.sufficient_decrease},
        {"alpha", cfg.boost_decrease},
        {"beta", cfg.tau_backtrack},
        {"rho", cfg.boost_backtrack},
        {"sigma0", cfg.boost_trial_init},
        {"delta", cfg.boost_trial_growth},
        {"trial_init", cfg.trial_init},
        {"rel_tol", cfg.rel_tol},
        {"max_iters", cfg.max_iters},
        {"residual_window", cfg.residual_window},
        {"zero_dir_tol", cfg.zero_dir_tol},
        {"max_backtracks", cfg.max_backtracks},
        {"trace_stride", cfg.trace_stride}}},
  };
  if (!summary.extras.empty()) j["extras"] = summary.extras;
  return j;
}

std::string summary_table(const RunSummary& summary) {
  std::ostringstream os;
  os << "input: " << summary.input_label << "\nmethod=" << to_string(summary.method)
     << " strategy=" << to_string(summary.strategy) << " seed=" << summary.seed << "\n";
  char line[256];
  std::snprintf(line, sizeof(line), "%-8s %12s %10s %14s %10s %s\n", "channel", "iterations",
                "time_s", "phi", "psnr_db", "termination");
  os << line;
  for (const ChannelResult& c : summary.channels) {
    std::snprintf(line, sizeof(line), "%-8s %12llu %10.2f %14.6g %10.2f %s\n", c.name.c_str(),
                  static_cast<unsigned long long>(c.iterations), c.time_s, c.phi_final,
                  c.psnr_db, to_string(c.termination));
    os << line;
  }
  std::snprintf(line, sizeof(line), "%-8s %12.1f %10.2f %14.6g %10.2f\n", "avg",
                summary.avg_iterations, summary.avg_time_s, summary.avg_phi, summary.avg_psnr);
  os << line;
  for (const auto& [key, value] : summary.extras) {
    os << key << " = " << format_double(value) << "\n";
  }
  return os.str();
}

}  // namespace blockprox
