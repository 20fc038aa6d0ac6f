#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "nsesmc/model.hpp"
#include "nsesmc/prior.hpp"
#include "nsesmc/rng.hpp"
#include "nsesmc/spectral.hpp"

namespace nsesmc {

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]] acting on (Re, Im).
struct Sym2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double trace() const { return xx + yy; }
  double det() const { return xx * yy - xy * xy; }
  Sym2 inverse() const;
  /// Lower Cholesky factor stored as (l11, l21, l22) in (xx, xy, yy).
  Sym2 cholesky() const;
  double quad(double a, double b) const { return xx * a * a + 2.0 * xy * a * b + yy * b * b; }
};

/// Per-mode Gaussian approximation over a frequency window, ready for proposals.
/// Every covariance is symmetric positive definite.
class WindowMoments {
 public:
  WindowMoments() = default;

  /// Applies the ridge S + eps tr(S)/2 I, falling back to the prior covariance
  /// when `degenerate` is set, tr(S) = 0, or the result is not positive definite.
  static WindowMoments regularized(Window window, std::vector<Vec2> means, std::vector<Sym2> covs,
                                   const PriorSpec& prior, bool degenerate, double eps = 1e-6);
  /// Moments equal to the prior's: the prior mean and (beta^2/2)|k|^{-2 alpha} I.
  static WindowMoments from_prior(Window window, const PriorSpec& prior);

  const Window& window() const noexcept { return window_; }
  std::span<const Vec2> means() const noexcept { return means_; }
  std::span<const Sym2> covs() const noexcept { return covs_; }
  std::span<const Sym2> inverses() const noexcept { return inverses_; }
  std::span<const Sym2> cholesky() const noexcept { return chols_; }
  std::span<const double> log_dets() const noexcept { return log_dets_; }

 private:
  void finish();

  Window window_;
  std::vector<Vec2> means_;
  std::vector<Sym2> covs_;
  std::vector<Sym2> inverses_;
  std::vector<Sym2> chols_;
  std::vector<double> log_dets_;
};

/// l_n^phi prod_{s<n} l_s for the posterior given blocks 1..n-1 tempered toward block n.
struct TemperedTarget {
  const BlockLikelihood* likelihood = nullptr;
  const PriorSpec* prior = nullptr;
  int n = 0;
  double phi = 1.0;

  /// Throws unless 0 <= phi <= 1 and 0 <= n <= horizon (n = 0 only with phi = 1).
  void validate() const;
};

/// phi log l_n + sum_{s<n} log l_s from the cached block values (n blocks needed).
/// The phi = 0 term is dropped even when log l_n is -infinity.
double tempered_log_target(const ChainState& state, const TemperedTarget& target);

/// Re-evaluates the caches of `state` through block target.n.
void refresh(ChainState& state, const TemperedTarget& target);

/// pCN proposal m0 + rho (u - m0) + sqrt(1 - rho^2) xi with xi drawn from the centred prior.
/// Draws Re then Im per lattice index.
SpectralField propose_pcn(const SpectralField& u, double rho, const PriorSpec& prior, RngStream& rng);

/// Windowed proposal: inside the window m + rho_L (u - m) + sqrt(1 - rho_L^2) N(0, S);
/// outside, the pCN move with rho_H.
SpectralField propose_windowed(const SpectralField& u, double rho_L, double rho_H, const WindowMoments& moments,
                               const PriorSpec& prior, RngStream& rng);

/// Log of the prior-window ratio times the reverse/forward proposal ratio for the
/// low-frequency block: [log mu0(v_L) - log mu0(u_L)] + [log Q(v_L, u_L) - log Q(u_L, v_L)].
double windowed_log_correction(const SpectralField& u, const SpectralField& v, double rho_L,
                               const WindowMoments& moments, const PriorSpec& prior);

/// Log Metropolis-Hastings ratio for a move current -> proposal; both caches must cover block n.
double pcn_log_ratio(const ChainState& current, const ChainState& proposal, const TemperedTarget& target);
double windowed_log_ratio(const ChainState& current, const ChainState& proposal, double rho_L,
                          const WindowMoments& moments, const TemperedTarget& target);

/// Accepts when log(U) < log_ratio; NaN ratios are rejected.
bool metropolis_accept(double log_ratio, RngStream& rng);

/// One kernel step. The state's caches must cover block target.n; they are
/// replaced by the proposal's on acceptance. Exactly one forward evaluation.
bool pcn_step(ChainState& state, double rho, const TemperedTarget& target, RngStream& rng);
bool windowed_step(ChainState& state, double rho_L, double rho_H, const WindowMoments& moments,
                   const TemperedTarget& target, RngStream& rng);

enum class KernelKind { kPcn, kWindowed };

struct KernelParams {
  KernelKind kind = KernelKind::kWindowed;
  double rho = 0.99;  // pCN
  double rho_L = 0.99;
  double rho_H = 0.991;
  const WindowMoments* moments = nullptr;  // required for kWindowed
};

/// M kernel steps; returns the number accepted.
int mutate(ChainState& state, int M, const KernelParams& params, const TemperedTarget& target, RngStream& rng);

/// Plain pCN chain of `iterations` steps from `init` (evaluated here). The observer
/// sees every state after its step, with the step's acceptance flag.
long run_pcn_chain(ChainState& state, double rho, long iterations, const TemperedTarget& target, RngStream& rng,
                   const std::function<void(long, const ChainState&, bool)>& observer = {});

}  // namespace nsesmc
