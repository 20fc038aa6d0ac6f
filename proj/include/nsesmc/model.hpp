#pragma once

#include <atomic>
#include <cstdint>
#include <vector>

#include "nsesmc/spectral.hpp"

namespace nsesmc {

/// A field together with its block log-likelihoods log l_s, s = 1..n, and the
/// model state at time n (for the forward model, the evolved field at n delta).
/// The caches are always re-derivable from `field`.
struct ChainState {
  SpectralField field;
  std::vector<double> log_liks;
  SpectralField evolved;

  /// A fresh state at time 0 with no blocks evaluated.
  static ChainState at_origin(SpectralField u) {
    ChainState s;
    s.field = u;
    s.evolved = std::move(u);
    return s;
  }
  int blocks() const noexcept { return static_cast<int>(log_liks.size()); }
};

/// Block likelihoods l_1..l_T of an initial condition. Implementations are
/// immutable apart from their call counters and safe to share across threads.
class BlockLikelihood {
 public:
  virtual ~BlockLikelihood() = default;

  virtual int horizon() const = 0;

  /// Rebuilds state.log_liks for blocks 1..n and state.evolved at time n from
  /// state.field with a single forward pass of length n.
  void evaluate(ChainState& state, int n) const;

  /// Appends block blocks()+1 starting from the cached evolved state, a single
  /// forward pass of length one block.
  void extend(ChainState& state) const;

  /// Forward-model invocations so far.
  std::uint64_t evolve_calls() const noexcept { return evolve_calls_.load(); }
  /// Forward-model time spanned so far, in units of one block.
  std::uint64_t block_solves() const noexcept { return block_solves_.load(); }
  void reset_counters() noexcept {
    evolve_calls_ = 0;
    block_solves_ = 0;
  }

 protected:
  /// Advances `state` by one block from block index `from` (time from*delta)
  /// and returns log l_{from+1}.
  virtual double advance_block(SpectralField& state, int from) const = 0;

 private:
  mutable std::atomic<std::uint64_t> evolve_calls_{0};
  mutable std::atomic<std::uint64_t> block_solves_{0};
};

/// l_s == 1 for every block: the posterior equals the prior.
class FlatLikelihood final : public BlockLikelihood {
 public:
  explicit FlatLikelihood(int horizon) : horizon_(horizon) {}
  int horizon() const override { return horizon_; }

 protected:
  double advance_block(SpectralField&, int) const override { return 0.0; }

 private:
  int horizon_;
};

}  // namespace nsesmc
