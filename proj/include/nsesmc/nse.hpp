#pragma once

#include <cstddef>
#include <vector>

#include "nsesmc/spectral.hpp"

namespace nsesmc {

struct SolverSpec {
  double nu = 0.02;
  double dt = 1e-3;
  /// Projected forcing P(f) in the psi basis; its lattice is the solver lattice.
  SpectralField forcing;
  int pad_factor = 2;
  /// Test hook. When false, products are formed on the unpadded grid and alias.
  bool dealias = true;
};

/// P(f) for f = grad_perp cos(wave . x). Zero when wave lies outside the lattice.
SpectralField grad_perp_cos_forcing(LatticePtr lattice, Mode wave = {5, 5});

/// Number of steps of length dt spanning t. Throws unless t is a nonnegative
/// integer multiple of dt (relative slack 1e-9).
long steps_for(double t, double dt);

/// Pseudo-spectral solver for dv/dt + nu A v + B(v,v) = P(f) on the torus:
/// first-order exponential time differencing with dealiased products.
/// Immutable after construction, so one instance may be shared across threads.
class NavierStokesSolver {
 public:
  explicit NavierStokesSolver(SolverSpec spec);

  const SolverSpec& spec() const noexcept { return spec_; }
  const LatticePtr& lattice_ptr() const noexcept { return spec_.forcing.lattice_ptr(); }
  int transform_size() const noexcept { return n_; }

  /// P(f) - B(v, v).
  SpectralField nonlinear_term(const SpectralField& v) const;
  SpectralField etd_step(const SpectralField& v) const;
  void etd_step_inplace(SpectralField& v) const;
  SpectralField evolve(const SpectralField& u, double t) const;
  void evolve_steps_inplace(SpectralField& v, long steps) const;

 private:
  struct ModeTables {
    double decay;      // exp(-nu |k|^2 dt)
    double weight;     // (1 - decay) / (nu |k|^2)
    double vel1;       // -k2 / (2 pi |k|)
    double vel2;       // k1 / (2 pi |k|)
    double vort;       // |k| / (2 pi)
    double proj;       // 2 pi / (|k| n^2)
    std::size_t slot;  // half-spectrum offset of k (or of -k when k2 < 0)
    std::size_t mirror_slot;  // offset of -k when k2 == 0
    int kind;          // 1: k2 > 0, -1: k2 < 0, 0: k2 == 0
  };

  void check_lattice(const SpectralField& v) const;
  void nonlinear_into(const SpectralField& v, std::vector<Complex>& out) const;

  SolverSpec spec_;
  int n_;
  std::vector<ModeTables> tables_;
};

}  // namespace nsesmc
