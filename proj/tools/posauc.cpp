// Command-line entry point: run experiment presets and describe instances.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "posauc/posauc.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitInstanceFailures = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Position auction equilibrium experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string out_dir;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--preset", preset, "Preset: main, wgfp, cwgsp, tiebreak, rounding, scale_k, scale_n, scale_m");
  run->add_option("--seed", seed, "Master seed");
  run->add_option("--jobs", jobs, "Worker threads");
  run->add_option("--out", out_dir, "Output directory");
  run->add_flag("--quiet", quiet, "Suppress progress lines");

  std::string instance_path;
  auto* describe = app.add_subcommand("describe", "Print a readable report of a serialized instance");
  describe->add_option("instance", instance_path, "Instance or setting JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  if (*describe) {
    try {
      std::cout << posauc::describe_instance(posauc::read_file(instance_path));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitValidation;
    }
    return 0;
  }

  posauc::ExperimentConfig config;
  try {
    const auto doc = posauc::parse_json_text(posauc::read_file(config_path));
    config = posauc::config_from_json(doc, preset.empty() ? std::nullopt : std::optional<std::string>(preset));
    if (seed) config.seed = *seed;
    if (jobs) config.jobs = *jobs;
    if (!out_dir.empty()) config.out = out_dir;
    posauc::validate_config(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  posauc::RunCallbacks callbacks;
  if (!quiet)
    callbacks.on_block = [](const posauc::DistributionReport& rep) {
      int unsolved = 0;
      for (const auto& inst : rep.instances)
        for (const auto& mr : inst.mechanisms) unsolved += mr.bound_substituted();
      std::cerr << rep.cell << ' ' << rep.distribution << ": " << rep.instances.size() << " instances, " << unsolved
                << " bound-substituted games\n";
    };
  try {
    const auto report = posauc::run_experiment(config, callbacks);
    if (report.failures > 0) {
      std::cerr << report.failures << " per-instance failure(s); see " << config.out << "/failures.csv\n";
      return kExitInstanceFailures;
    }
  } catch (const posauc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
