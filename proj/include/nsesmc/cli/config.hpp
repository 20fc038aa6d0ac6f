#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsesmc/nse.hpp"
#include "nsesmc/prior.hpp"
#include "nsesmc/smc.hpp"
#include "nsesmc/spectral.hpp"

namespace nsesmc::cli {

/// Invalid or inconsistent configuration; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PriorSection {
  double beta2 = 5.0;
  double alpha = 2.2;
};

struct SolverSection {
  double nu = 0.02;
  double dt = 1e-3;
  /// "grad-perp-cos" or "file".
  std::string forcing = "grad-perp-cos";
  Mode forcing_wave{5, 5};
  std::string forcing_file;
  int half_width = 31;
  int pad_factor = 2;
};

struct ObservationSection {
  double delta = 0.02;
  int T = 5;
  int upsilon = 16;
  /// Explicit positions override the regular grid when nonempty.
  std::vector<Point> positions;
  double gamma2 = 0.2;
};

struct McmcSection {
  double rho = 0.9998;
  long iterations = 100000;
  long thin = 10;
  long burn_in = 0;
  /// Recorded coefficients: modes with max(|k1|,|k2|) <= record_half_width.
  int record_half_width = 2;
  int max_lag = 200;
};

struct ExperimentConfig {
  PriorSection prior;
  SolverSection solver;
  ObservationSection observation;
  SmcConfig smc;
  bool snapshots = true;
  McmcSection mcmc;
  std::uint64_t seed = 1;
  std::string output = "out";

  /// Cross-field checks; throws ConfigError.
  void validate() const;

  LatticePtr lattice() const;
  PriorSpec prior_spec(LatticePtr lattice) const;
  /// Reads a forcing file relative to `base_dir` when configured so.
  SolverSpec solver_spec(LatticePtr lattice, const std::filesystem::path& base_dir = {}) const;
  std::vector<Point> positions() const;
};

/// Defaults with the file's values applied, then each "section.key=value" override.
/// A missing path means defaults only.
ExperimentConfig load_config(const std::optional<std::filesystem::path>& path,
                             const std::vector<std::string>& overrides = {});

/// Parses INI text (same rules as load_config) on top of the defaults.
ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

/// Canonical INI rendering of every key; parse_config(render_config(c)) == c.
std::string render_config(const ExperimentConfig& config);

}  // namespace nsesmc::cli
