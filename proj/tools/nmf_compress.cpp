// Image-compression front end: per-channel nonnegative matrix factorization
// driven by the randomized block proximal gradient solver.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blockprox/errors.hpp"
#include "blockprox/experiment.hpp"

namespace {

using blockprox::RunSpec;

struct CommonFlags {
  std::string method = "arbpg";
  std::string strategy;
  std::uint64_t seed = 0;
  double tol = 1e-4;
  std::uint64_t max_iters = 1'500'000;
  int jobs = 1;
  std::string out_dir;
  std::uint64_t trace_stride = 1000;
  bool save_factors = false;
  bool timing = false;
  bool serial_kernels = false;
};

void add_common_flags(CLI::App* app, CommonFlags* flags) {
  app->add_option("--method", flags->method, "rnbpg | arbpg | arbpg-b")
      ->capture_default_str();
  app->add_option("--strategy", flags->strategy,
                  "trial stepsize rule: fixed | decreasing | adaptive");
  app->add_option("--seed", flags->seed, "base seed; channel streams derive from it")
      ->capture_default_str();
  app->add_option("--tol", flags->tol, "relative residual stopping tolerance")
      ->capture_default_str();
  app->add_option("--max-iters", flags->max_iters, "iteration cap")->capture_default_str();
  app->add_option("--jobs", flags->jobs, "channel parallelism (1 = sequential)")
      ->capture_default_str();
  app->add_option("--out", flags->out_dir, "directory for summary/trace/image artifacts");
  app->add_option("--trace-stride", flags->trace_stride,
                  "record every K-th iteration in traces (0 = none)")
      ->capture_default_str();
  app->add_flag("--save-factors", flags->save_factors,
                "persist factor matrices next to the summary");
  app->add_flag("--timing", flags->timing,
                "write measured wall times into JSON/CSV artifacts (breaks byte-level "
                "reproducibility of artifacts)");
  app->add_flag("--serial-kernels", flags->serial_kernels,
                "force the serial reference kernels");
}

RunSpec spec_from_flags(const CommonFlags& flags) {
  RunSpec spec;
  spec.method = blockprox::parse_method(flags.method);
  if (!flags.strategy.empty()) spec.strategy = blockprox::parse_strategy(flags.strategy);
  spec.seed = flags.seed;
  spec.rel_tol = flags.tol;
  spec.max_iters = flags.max_iters;
  spec.jobs = flags.jobs;
  spec.out_dir = flags.out_dir;
  spec.trace_stride = flags.trace_stride;
  spec.save_factors = flags.save_factors;
  spec.timing_in_artifacts = flags.timing;
  spec.parallel_kernels = !flags.serial_kernels;
  return spec;
}

// "--spec method=arbpg,strategy=adaptive,seed=3" overrides on top of the base.
RunSpec apply_overrides(RunSpec spec, const std::string& overrides) {
  std::stringstream ss(overrides);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw blockprox::UsageError("--spec entries must look like key=value: '" + item + "'");
    }
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "method") {
      spec.method = blockprox::parse_method(value);
    } else if (key == "strategy") {
      spec.strategy = blockprox::parse_strategy(value);
    } else if (key == "seed") {
      spec.seed = std::stoull(value);
    } else {
      throw blockprox::UsageError("--spec key must be method|strategy|seed, got '" + key + "'");
    }
  }
  return spec;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"nmf-compress: image compression via randomized block proximal gradient NMF"};
  app.require_subcommand(0, 1);

  CommonFlags flags;
  std::string input_png;
  std::size_t rank = 0;
  add_common_flags(&app, &flags);
  app.add_option("--input", input_png, "input PNG (8-bit RGB or grayscale)");
  app.add_option("--rank", rank, "factorization rank p");

  CLI::App* preset_cmd = app.add_subcommand("preset", "run a synthetic problem preset");
  CommonFlags preset_flags;
  std::string preset_id;
  preset_cmd->add_option("id", preset_id, "lowrank-exact | quad-l1 | quartic-1d")->required();
  add_common_flags(preset_cmd, &preset_flags);

  CLI::App* compare_cmd =
      app.add_subcommand("compare", "run several method/strategy specs on one input");
  CommonFlags compare_flags;
  std::string compare_input, compare_preset;
  std::size_t compare_rank = 0;
  std::vector<std::string> spec_overrides;
  compare_cmd->add_option("--input", compare_input, "input PNG shared by all specs");
  compare_cmd->add_option("--preset", compare_preset, "preset shared by all specs");
  compare_cmd->add_option("--rank", compare_rank, "factorization rank p");
  compare_cmd->add_option("--spec", spec_overrides,
                          "one spec per flag, e.g. --spec method=arbpg,strategy=adaptive");
  add_common_flags(compare_cmd, &compare_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (preset_cmd->parsed()) {
    RunSpec spec = spec_from_flags(preset_flags);
    spec.preset = preset_id;
    const auto summary = blockprox::run_preset(spec);
    std::cout << blockprox::summary_table(summary);
    return 0;
  }

  if (compare_cmd->parsed()) {
    RunSpec base = spec_from_flags(compare_flags);
    base.input_png = compare_input;
    base.preset = compare_preset;
    base.rank = compare_rank;
    if (!base.out_dir.empty()) base.out_dir.clear();  // compare writes no per-run artifacts
    std::vector<RunSpec> specs;
    for (const std::string& s : spec_overrides) specs.push_back(apply_overrides(base, s));
    const auto summaries = blockprox::compare_runs(specs);
    std::cout << blockprox::compare_table(summaries);
    return 0;
  }

  if (input_png.empty()) {
    throw blockprox::UsageError("an --input image (or a subcommand) is required");
  }
  RunSpec spec = spec_from_flags(flags);
  spec.input_png = input_png;
  spec.rank = rank;
  const auto summary = blockprox::run_experiment(spec);
  std::cout << blockprox::summary_table(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const blockprox::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const blockprox::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  }
}
