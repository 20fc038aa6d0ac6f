#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nsesmc/mcmc.hpp"
#include "nsesmc/model.hpp"
#include "nsesmc/prior.hpp"
#include "nsesmc/rng.hpp"

namespace nsesmc {

/// (sum_j W_j^2)^{-1}. Weights need not be normalized; all-zero weights throw.
double ess(std::span<const double> weights);

/// Normalized weights proportional to base_j exp((phi - phi_prev) log_lik_j),
/// computed with max-subtraction. An empty `base` means uniform. Throws when
/// every weight vanishes.
std::vector<double> reweight(std::span<const double> log_liks, double phi_prev, double phi,
                             std::span<const double> base = {});

struct TemperatureSolve {
  double phi = 1.0;
  double ess = 0.0;
  int iterations = 0;
  /// ESS just above phi_prev was already below the threshold; phi = 1 was returned.
  bool not_bracketed = false;
};

/// Next temperature on (phi_prev, 1]: exactly 1 when ESS(1) >= n_thresh, otherwise a
/// bisection root of ESS(phi) = n_thresh stopped at |ESS - n_thresh| <= tol or
/// after max_iter halvings. The result is always > phi_prev.
TemperatureSolve next_temperature(std::span<const double> log_liks, double phi_prev, double n_thresh, double tol,
                                  int max_iter, std::span<const double> base = {});

/// N iid categorical draws by inverse CDF.
std::vector<std::size_t> resample_multinomial(std::span<const double> weights, RngStream& rng);
/// One uniform offset and N evenly spaced points.
std::vector<std::size_t> resample_systematic(std::span<const double> weights, RngStream& rng);

/// Weighted per-mode mean and covariance of (Re u_k, Im u_k) over the window,
/// regularized as in WindowMoments::regularized.
WindowMoments window_moments(std::span<const ChainState> particles, std::span<const double> weights,
                             const Window& window, const PriorSpec& prior, double eps = 1e-6);

/// Lattice index per tracked mode. A mode outside the upper half is replaced by
/// its mirror; a mode absent from the lattice maps to nullopt.
std::vector<std::optional<std::size_t>> resolve_tracked(const FreqLattice& lattice, std::span<const Mode> modes);

/// Ratio sum_j W_j |u_k^j(M) - u_k^j(0)|^2 / (2 sum_j W_j |u_k^j(0) - mu_k|^2) per tracked
/// index, with mu the weighted mean of the pre-mutation population. Empty weights
/// mean uniform. Absent modes and zero denominators give NaN.
std::vector<double> jitter_statistic(std::span<const SpectralField> pre, std::span<const SpectralField> post,
                                     std::span<const std::optional<std::size_t>> tracked,
                                     std::span<const double> weights = {});

/// The frequencies monitored by default.
std::vector<Mode> default_tracked_modes();

enum class Tempering { kAdaptive, kNone };
enum class ResamplePolicy { kAlways, kAdaptive };
enum class ResampleScheme { kMultinomial, kSystematic };

struct SmcConfig {
  int N = 1020;
  double N_thresh = 340.0;
  int M = 20;
  int K = 7;
  double rho_L = 0.99;
  double rho_H = 0.991;
  KernelKind kernel = KernelKind::kWindowed;
  double rho = 0.99;  // step size of the pCN kernel
  Tempering tempering = Tempering::kAdaptive;
  ResamplePolicy resample_at_phi1 = ResamplePolicy::kAlways;
  ResampleScheme resampling = ResampleScheme::kMultinomial;
  /// Bisection stops at |ESS - N_thresh| <= bisection_tol * N.
  double bisection_tol = 0.01;
  int bisection_max_iter = 50;
  double cov_eps = 1e-6;
  std::vector<Mode> tracked = default_tracked_modes();
  std::uint64_t seed = 1;
  /// Threads used for data-parallel phases. Results do not depend on it.
  int workers = 1;

  void validate() const;
};

struct Ensemble {
  std::vector<ChainState> particles;
  std::vector<double> weights;
  int n = 0;
  int r = 0;

  std::size_t size() const noexcept { return particles.size(); }
};

struct TemperRow {
  int n = 0;
  int r = 0;
  double phi = 0.0;
  double ess = 0.0;
  double acc_mean = 0.0;
  double acc_min = 0.0;
  double acc_max = 0.0;
  std::vector<double> jitter;
  bool resampled = true;
  /// Forward-model invocations since the start of the run.
  std::uint64_t evolve_calls = 0;
  double wall_ms = 0.0;
};

struct SmcHooks {
  std::function<void(const TemperRow&)> on_row;
  /// Called after the ensemble reaches phi = 1 at block n (n = 0 is the prior).
  std::function<void(int, const Ensemble&)> on_stage;
};

struct SmcResult {
  Ensemble ensemble;
  std::vector<TemperRow> log;
  std::uint64_t evolve_calls = 0;
};

/// Forward-model invocations a run must make: N per block plus N M per sweep.
std::uint64_t predicted_evolve_calls(const SmcConfig& config, int horizon, std::size_t sweeps);

/// Runs `body(i)` for i in [0, count) on up to `workers` threads.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

/// Adaptive tempered SMC over blocks 1..horizon of `likelihood`.
SmcResult run_smc(const SmcConfig& config, const BlockLikelihood& likelihood, const PriorSpec& prior,
                  const SmcHooks& hooks = {});

}  // namespace nsesmc
