#include "nsesmc/diag.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nsesmc {

std::vector<Complex> standardize(const SpectralField& field, const PriorSpec& prior) {
  if (field.lattice() != prior.lattice()) throw std::invalid_argument("field and prior lattices differ");
  const auto stds = prior.component_stds();
  std::vector<Complex> xi(field.size());
  for (std::size_t i = 0; i < xi.size(); ++i) xi[i] = (field[i] - prior.mean(i)) / stds[i];
  return xi;
}

SpectralField unstandardize(std::span<const Complex> xi, const PriorSpec& prior) {
  if (xi.size() != prior.lattice().size()) throw std::invalid_argument("coefficient count does not match lattice");
  const auto stds = prior.component_stds();
  SpectralField u(prior.lattice_ptr());
  for (std::size_t i = 0; i < xi.size(); ++i) u[i] = prior.mean(i) + stds[i] * xi[i];
  return u;
}

const MarginalRow* MarginalSummary::find(Mode k) const {
  for (const auto& r : rows)
    if (r.k == k) return &r;
  return nullptr;
}

std::vector<Mode> MarginalSummary::flagged_modes() const {
  std::vector<Mode> out;
  for (const auto& r : rows)
    if (r.flagged) out.push_back(r.k);
  return out;
}

std::vector<Mode> MarginalSummary::flagged_modes_re() const {
  std::vector<Mode> out;
  for (const auto& r : rows)
    if (r.ratio_re < threshold) out.push_back(r.k);
  return out;
}

MarginalSummary summarize_fields(std::span<const SpectralField> fields, std::span<const double> weights,
                                 const PriorSpec& prior, double threshold) {
  if (fields.empty()) throw std::invalid_argument("cannot summarize an empty ensemble");
  if (!weights.empty() && weights.size() != fields.size()) throw std::invalid_argument("weight count mismatch");
  const double uniform = 1.0 / static_cast<double>(fields.size());
  const auto w = [&](std::size_t j) { return weights.empty() ? uniform : weights[j]; };

  std::vector<std::vector<Complex>> xi;
  xi.reserve(fields.size());
  for (const auto& f : fields) xi.push_back(standardize(f, prior));

  MarginalSummary out;
  out.threshold = threshold;
  const FreqLattice& lattice = prior.lattice();
  out.rows.resize(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    double wsum = 0.0;
    double mr = 0.0;
    double mi = 0.0;
    for (std::size_t j = 0; j < xi.size(); ++j) {
      wsum += w(j);
      mr += w(j) * xi[j][i].real();
      mi += w(j) * xi[j][i].imag();
    }
    mr /= wsum;
    mi /= wsum;
    double vr = 0.0;
    double vi = 0.0;
    for (std::size_t j = 0; j < xi.size(); ++j) {
      const double a = xi[j][i].real() - mr;
      const double b = xi[j][i].imag() - mi;
      vr += w(j) * a * a;
      vi += w(j) * b * b;
    }
    vr /= wsum;
    vi /= wsum;
    MarginalRow& r = out.rows[i];
    r.k = lattice[i];
    r.mean_re = mr;
    r.mean_im = mi;
    r.std_re = std::sqrt(vr);
    r.std_im = std::sqrt(vi);
    r.ratio_re = r.std_re;
    r.ratio_im = r.std_im;
    r.ratio_combined = std::sqrt(0.5 * (vr + vi));
    r.flagged = r.ratio_combined < threshold;
  }
  return out;
}

MarginalSummary summarize_ensemble(std::span<const ChainState> particles, std::span<const double> weights,
                                   const PriorSpec& prior, double threshold) {
  std::vector<SpectralField> fields;
  fields.reserve(particles.size());
  for (const auto& p : particles) fields.push_back(p.field);
  return summarize_fields(fields, weights, prior, threshold);
}

std::vector<double> ratio_heat_map(const MarginalSummary& summary, int half_width) {
  if (half_width < 0) throw std::invalid_argument("half-width must be >= 0");
  const int w = 2 * half_width + 1;
  std::vector<double> grid(static_cast<std::size_t>(w) * w, std::numeric_limits<double>::quiet_NaN());
  const auto put = [&](Mode k, double v) {
    if (k.max_abs() > half_width) return;
    grid[static_cast<std::size_t>(k.k1 + half_width) * w + (k.k2 + half_width)] = v;
  };
  for (const auto& r : summary.rows) {
    put(r.k, r.ratio_combined);
    put(-r.k, r.ratio_combined);
  }
  return grid;
}

std::vector<double> autocorrelation(std::span<const double> series, int max_lag) {
  if (max_lag < 0) throw std::invalid_argument("max_lag must be >= 0");
  const std::size_t n = series.size();
  if (n <= static_cast<std::size_t>(max_lag)) throw std::invalid_argument("series must be longer than max_lag");
  double mean = 0.0;
  for (const double x : series) mean += x;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (const double x : series) c0 += (x - mean) * (x - mean);
  std::vector<double> acf(static_cast<std::size_t>(max_lag) + 1, std::numeric_limits<double>::quiet_NaN());
  acf[0] = 1.0;
  if (!(c0 > 0.0)) return acf;
  for (int l = 1; l <= max_lag; ++l) {
    double c = 0.0;
    for (std::size_t t = 0; t + l < n; ++t) c += (series[t] - mean) * (series[t + l] - mean);
    acf[l] = c / c0;
  }
  return acf;
}

double batch_means_se(std::span<const double> series, int batches) {
  if (batches < 2) throw std::invalid_argument("need at least two batches");
  const std::size_t len = series.size() / static_cast<std::size_t>(batches);
  if (len == 0) throw std::invalid_argument("series shorter than the number of batches");
  std::vector<double> means(static_cast<std::size_t>(batches), 0.0);
  for (int b = 0; b < batches; ++b) {
    for (std::size_t t = 0; t < len; ++t) means[b] += series[b * len + t];
    means[b] /= static_cast<double>(len);
  }
  double m = 0.0;
  for (const double x : means) m += x;
  m /= batches;
  double v = 0.0;
  for (const double x : means) v += (x - m) * (x - m);
  v /= (batches - 1);
  return std::sqrt(v / batches);
}

}  // namespace nsesmc
