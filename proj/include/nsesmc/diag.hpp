#pragma once

#include <span>
#include <vector>

#include "nsesmc/model.hpp"
#include "nsesmc/prior.hpp"
#include "nsesmc/spectral.hpp"

namespace nsesmc {

/// xi_k = (u_k - m_k) (sqrt 2 / beta) |k|^alpha, one value per lattice index.
std::vector<Complex> standardize(const SpectralField& field, const PriorSpec& prior);
SpectralField unstandardize(std::span<const Complex> xi, const PriorSpec& prior);

struct MarginalRow {
  Mode k;
  double mean_re = 0.0;
  double mean_im = 0.0;
  double std_re = 0.0;
  double std_im = 0.0;
  // Standardized prior std is 1, so each ratio is the posterior std itself.
  double ratio_re = 0.0;
  double ratio_im = 0.0;
  /// sqrt of the mean of the two component variances.
  double ratio_combined = 0.0;
  /// ratio_combined below the adequacy threshold.
  bool flagged = false;
};

struct MarginalSummary {
  std::vector<MarginalRow> rows;  // lattice order
  double threshold = 0.8;

  const MarginalRow* find(Mode k) const;
  std::vector<Mode> flagged_modes() const;
  std::vector<Mode> flagged_modes_re() const;
};

/// Weighted means and stds of standardized coefficients.
MarginalSummary summarize_ensemble(std::span<const ChainState> particles, std::span<const double> weights,
                                   const PriorSpec& prior, double threshold = 0.8);
MarginalSummary summarize_fields(std::span<const SpectralField> fields, std::span<const double> weights,
                                 const PriorSpec& prior, double threshold = 0.8);

/// Dense (2H+1) x (2H+1) grid of ratio_combined indexed [(k1+H)(2H+1) + (k2+H)],
/// mirrored to -k; k = 0 and modes outside the lattice are NaN.
std::vector<double> ratio_heat_map(const MarginalSummary& summary, int half_width);

/// Biased autocorrelation estimate for lags 0..max_lag. A constant series
/// gives 1 at lag 0 and NaN beyond.
std::vector<double> autocorrelation(std::span<const double> series, int max_lag);

/// Standard error of the series mean from `batches` equal contiguous batches.
double batch_means_se(std::span<const double> series, int batches);

}  // namespace nsesmc
