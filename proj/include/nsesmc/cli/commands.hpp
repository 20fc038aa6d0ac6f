#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "nsesmc/cli/config.hpp"
#include "nsesmc/obs.hpp"

namespace nsesmc::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitRuntime = 2, kExitCheck = 3 };

/// Samples the truth from the prior, evolves it and writes dataset.json,
/// truth.csv, config.ini and manifest.json into out_dir.
int cmd_synth(const ExperimentConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

/// Throws ConfigError when the dataset was not produced under the configured
/// solver, lattice and noise level.
void check_dataset_consistency(const ExperimentConfig& config, const Dataset& dataset);

int cmd_run_smc(const ExperimentConfig& config, const std::filesystem::path& dataset_path,
                const std::filesystem::path& out_dir, int workers, std::ostream& log);
int cmd_run_mcmc(const ExperimentConfig& config, const std::filesystem::path& dataset_path,
                 const std::filesystem::path& out_dir, std::ostream& log);
int cmd_summarize(const ExperimentConfig& config, const std::filesystem::path& snapshot_dir,
                  const std::filesystem::path& out_dir, std::ostream& log);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CheckOptions {
  /// Test hook: run the convolution check against an aliasing solver.
  bool dealias = true;
};

std::vector<CheckResult> run_checks(const ExperimentConfig& config, const CheckOptions& options);
int cmd_check(const ExperimentConfig& config, const CheckOptions& options, std::ostream& log);

/// P(f) - P((v.grad)v) by direct summation over all mode pairs; no transforms.
SpectralField direct_nonlinear_term(const SpectralField& v, const SpectralField& forcing);

}  // namespace nsesmc::cli
