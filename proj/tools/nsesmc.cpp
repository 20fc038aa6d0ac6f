#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nsesmc/cli/commands.hpp"
#include "nsesmc/cli/config.hpp"

namespace fs = std::filesystem;
using namespace nsesmc::cli;

int main(int argc, char** argv) {
  CLI::App app{"Adaptive SMC and pCN MCMC for Navier-Stokes initial-condition inference"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "INI configuration file");
    sub->add_option("--set", overrides, "Override a config value, section.key=value (repeatable)");
  };

  std::string out_dir;
  std::string data_path;
  std::string snapshot_dir;
  int workers = 1;
  bool no_dealias = false;

  auto* synth = app.add_subcommand("synth", "Sample a true field, evolve it and write a dataset");
  common(synth);
  synth->add_option("-o,--out", out_dir, "Output directory (default: run.output)");

  auto* smc = app.add_subcommand("run-smc", "Run the adaptive SMC sampler on a dataset");
  common(smc);
  smc->add_option("-d,--data", data_path, "Dataset file written by synth")->required();
  smc->add_option("-o,--out", out_dir, "Output directory (default: run.output)");
  smc->add_option("-j,--workers", workers, "Worker threads for particle-parallel phases")->check(CLI::PositiveNumber);

  auto* mcmc = app.add_subcommand("run-mcmc", "Run the pCN benchmark chain on a dataset");
  common(mcmc);
  mcmc->add_option("-d,--data", data_path, "Dataset file written by synth")->required();
  mcmc->add_option("-o,--out", out_dir, "Output directory (default: run.output)");

  auto* check = app.add_subcommand("check", "Run the fast invariant battery");
  common(check);
  check->add_flag("--no-dealias", no_dealias, "Disable dealiasing in the convolution check (should fail)");

  auto* summarize = app.add_subcommand("summarize", "Marginal summaries and heat map from an ensemble snapshot");
  common(summarize);
  summarize->add_option("-s,--snapshot", snapshot_dir, "Snapshot directory (weights.csv and particle files)")
      ->required();
  summarize->add_option("-o,--out", out_dir, "Output directory (default: run.output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const std::optional<fs::path> path = config_path.empty() ? std::nullopt : std::optional<fs::path>(config_path);
    const ExperimentConfig config = load_config(path, overrides);
    const fs::path out = out_dir.empty() ? fs::path(config.output) : fs::path(out_dir);
    if (*synth) return cmd_synth(config, out, std::cerr);
    if (*smc) return cmd_run_smc(config, data_path, out, workers, std::cerr);
    if (*mcmc) return cmd_run_mcmc(config, data_path, out, std::cerr);
    if (*check) return cmd_check(config, CheckOptions{!no_dealias}, std::cout);
    if (*summarize) return cmd_summarize(config, snapshot_dir, out, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
