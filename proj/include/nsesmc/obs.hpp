#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nsesmc/model.hpp"
#include "nsesmc/nse.hpp"
#include "nsesmc/rng.hpp"
#include "nsesmc/spectral.hpp"

namespace nsesmc {

/// How a dataset was produced. Carried in the dataset file.
struct Provenance {
  std::uint64_t seed = 0;
  double nu = 0.0;
  double dt = 0.0;
  int half_width = 0;
  int pad_factor = 2;
  std::string forcing;
};

/// Eulerian velocity records y_{n,s} = v(x_s, n delta) + gamma zeta_{n,s}.
struct Dataset {
  std::vector<Point> positions;
  double delta = 0.0;
  int horizon = 0;
  double gamma = 0.0;
  /// records[(n-1) * positions.size() + s] for block n = 1..horizon.
  std::vector<Vec2> records;
  Provenance provenance;

  std::size_t upsilon() const noexcept { return positions.size(); }
  std::span<const Vec2> block(int n) const;
  /// Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
};

/// Uniform s x s grid at offsets 2pi(i + 1/2)/s; upsilon must be a perfect square.
std::vector<Point> regular_grid_positions(int upsilon);

/// Exact band-limited point evaluation v(x) = sum over the mirrored lattice of v_k psi_k(x).
std::vector<Vec2> eval_velocity_at(const SpectralField& field, std::span<const Point> points);

Dataset synthesize(const SpectralField& u_true, std::vector<Point> positions, double delta, int horizon,
                   double gamma, const NavierStokesSolver& solver, RngStream& rng);

/// -1/(2 gamma^2) sum_s |y_{n,s} - v_s|^2 given predicted velocities at block n.
/// With gamma = 0 the value is 0 for an exact match and -infinity otherwise.
double block_log_lik(std::span<const Vec2> predicted, int n, const Dataset& dataset);

struct BlockResult {
  double log_lik;
  SpectralField state;  // evolved field at n delta
};

/// log l_n(y_n; u). `cache`, if given, must be the evolved state of u at (n-1) delta.
BlockResult log_lik_block(const SpectralField& u, int n, const Dataset& dataset, const NavierStokesSolver& solver,
                          const SpectralField* cache = nullptr);

/// Forward model and Gaussian observation likelihood as a BlockLikelihood.
/// Holds references; dataset and solver must outlive it.
class NseLikelihood final : public BlockLikelihood {
 public:
  NseLikelihood(const Dataset& dataset, const NavierStokesSolver& solver);
  int horizon() const override { return dataset_.horizon; }

  const Dataset& dataset() const noexcept { return dataset_; }
  const NavierStokesSolver& solver() const noexcept { return solver_; }

 protected:
  double advance_block(SpectralField& state, int from) const override;

 private:
  std::vector<Vec2> predict(const SpectralField& v) const;

  const Dataset& dataset_;
  const NavierStokesSolver& solver_;
  long steps_per_block_;
  // psi_k(x_s) for every lattice mode and position, [s * modes + i].
  std::vector<CVec2> basis_;
};

}  // namespace nsesmc
