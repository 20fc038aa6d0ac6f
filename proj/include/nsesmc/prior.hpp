#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nsesmc/rng.hpp"
#include "nsesmc/spectral.hpp"

namespace nsesmc {

/// Gaussian prior N(m, beta^2 A^{-alpha}) in the psi_k basis. The mean is zero
/// unless one is supplied.
class PriorSpec {
 public:
  PriorSpec(double beta, double alpha, LatticePtr lattice, std::optional<SpectralField> mean = std::nullopt);
  static PriorSpec from_beta2(double beta2, double alpha, LatticePtr lattice);

  double beta() const noexcept { return beta_; }
  double alpha() const noexcept { return alpha_; }
  const LatticePtr& lattice_ptr() const noexcept { return lattice_; }
  const FreqLattice& lattice() const noexcept { return *lattice_; }

  /// Standard deviation of Re u_k (equivalently Im u_k): (beta/sqrt 2)|k|^{-alpha}.
  double component_std(Mode k) const;
  /// component_std per lattice index, precomputed.
  std::span<const double> component_stds() const noexcept { return stds_; }

  Complex mean(std::size_t i) const { return mean_ ? (*mean_)[i] : Complex{}; }
  bool has_mean() const noexcept { return mean_.has_value(); }

 private:
  double beta_;
  double alpha_;
  LatticePtr lattice_;
  std::optional<SpectralField> mean_;
  std::vector<double> stds_;
};

/// A set of upper-half lattice modes, held as lattice indices.
class Window {
 public:
  Window() = default;
  /// Square window max(|k1|,|k2|) <= K.
  static Window square(const FreqLattice& lattice, int K);
  /// Explicit mode list; each mode must be a nonzero upper-half lattice mode.
  static Window from_modes(const FreqLattice& lattice, std::span<const Mode> modes);

  std::span<const std::size_t> indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  /// Per lattice index: position inside the window, or -1.
  int slot(std::size_t lattice_index) const {
    return lattice_index < slots_.size() ? slots_[lattice_index] : -1;
  }

 private:
  Window(std::vector<std::size_t> indices, std::size_t lattice_size);

  std::vector<std::size_t> indices_;
  std::vector<int> slots_;
};

SpectralField sample_prior(const PriorSpec& spec, RngStream& rng);

/// -sum_{k in window} beta^{-2}|k|^{2 alpha}|u_k - m_k|^2, without the
/// normalizing constant.
double prior_log_density_window(const SpectralField& field, const Window& window, const PriorSpec& spec);

}  // namespace nsesmc
