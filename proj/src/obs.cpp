#include "nsesmc/obs.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace nsesmc {

std::span<const Vec2> Dataset::block(int n) const {
  if (n < 1 || n > horizon) throw std::out_of_range("block index " + std::to_string(n) + " out of range");
  const std::size_t u = upsilon();
  return std::span<const Vec2>(records).subspan(static_cast<std::size_t>(n - 1) * u, u);
}

void Dataset::validate() const {
  if (horizon < 0) throw std::invalid_argument("dataset horizon must be >= 0");
  if (horizon > 0 && positions.empty()) throw std::invalid_argument("dataset has no observation positions");
  if (!(delta > 0.0)) throw std::invalid_argument("observation spacing delta must be > 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("noise scale gamma must be finite and >= 0");
  if (records.size() != static_cast<std::size_t>(horizon) * positions.size())
    throw std::invalid_argument("dataset records do not match horizon x positions");
  std::set<std::pair<double, double>> seen;
  for (const Point& x : positions) {
    for (const double c : x)
      if (!(c >= 0.0 && c < kTwoPi)) throw std::invalid_argument("observation position outside [0, 2pi)^2");
    if (!seen.emplace(x[0], x[1]).second) throw std::invalid_argument("duplicate observation position");
  }
  for (const Vec2& y : records)
    if (!std::isfinite(y[0]) || !std::isfinite(y[1])) throw std::invalid_argument("non-finite observation record");
}

std::vector<Point> regular_grid_positions(int upsilon) {
  if (upsilon < 1) throw std::invalid_argument("number of positions must be >= 1");
  const int s = static_cast<int>(std::lround(std::sqrt(static_cast<double>(upsilon))));
  if (s * s != upsilon) throw std::invalid_argument("regular grid needs a perfect-square number of positions");
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(upsilon));
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) out.push_back({kTwoPi * (i + 0.5) / s, kTwoPi * (j + 0.5) / s});
  return out;
}

std::vector<Vec2> eval_velocity_at(const SpectralField& field, std::span<const Point> points) {
  std::vector<Vec2> out(points.size(), Vec2{0.0, 0.0});
  const FreqLattice& lattice = field.lattice();
  for (std::size_t s = 0; s < points.size(); ++s) {
    double a = 0.0;
    double b = 0.0;
    for (std::size_t i = 0; i < lattice.size(); ++i) {
      // u_{-k} psi_{-k} = conj(u_k psi_k), so each pair contributes 2 Re(u_k psi_k).
      const CVec2 psi = basis_eval(lattice[i], points[s]);
      a += 2.0 * (field[i] * psi[0]).real();
      b += 2.0 * (field[i] * psi[1]).real();
    }
    out[s] = {a, b};
  }
  return out;
}

Dataset synthesize(const SpectralField& u_true, std::vector<Point> positions, double delta, int horizon,
                   double gamma, const NavierStokesSolver& solver, RngStream& rng) {
  if (positions.empty()) throw std::invalid_argument("synthesis needs at least one position");
  if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  const long steps = steps_for(delta, solver.spec().dt);

  Dataset d;
  d.positions = std::move(positions);
  d.delta = delta;
  d.horizon = horizon;
  d.gamma = gamma;
  d.records.reserve(static_cast<std::size_t>(horizon) * d.positions.size());
  SpectralField v = u_true;
  for (int n = 1; n <= horizon; ++n) {
    solver.evolve_steps_inplace(v, steps);
    for (const Vec2& w : eval_velocity_at(v, d.positions)) {
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      d.records.push_back({w[0] + gamma * z1, w[1] + gamma * z2});
    }
  }
  d.provenance.nu = solver.spec().nu;
  d.provenance.dt = solver.spec().dt;
  d.provenance.half_width = u_true.lattice().half_width();
  d.provenance.pad_factor = solver.spec().pad_factor;
  d.validate();
  return d;
}

double block_log_lik(std::span<const Vec2> predicted, int n, const Dataset& dataset) {
  const auto y = dataset.block(n);
  if (predicted.size() != y.size()) throw std::invalid_argument("prediction count does not match positions");
  double ss = 0.0;
  for (std::size_t s = 0; s < y.size(); ++s) {
    const double e1 = y[s][0] - predicted[s][0];
    const double e2 = y[s][1] - predicted[s][1];
    ss += e1 * e1 + e2 * e2;
  }
  if (dataset.gamma == 0.0) return ss == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return -ss / (2.0 * dataset.gamma * dataset.gamma);
}

BlockResult log_lik_block(const SpectralField& u, int n, const Dataset& dataset, const NavierStokesSolver& solver,
                          const SpectralField* cache) {
  if (n < 1 || n > dataset.horizon) throw std::out_of_range("block index out of range");
  const long steps = steps_for(dataset.delta, solver.spec().dt);
  SpectralField v = cache ? *cache : u;
  solver.evolve_steps_inplace(v, cache ? steps : steps * n);
  const auto pred = eval_velocity_at(v, dataset.positions);
  return {block_log_lik(pred, n, dataset), std::move(v)};
}

NseLikelihood::NseLikelihood(const Dataset& dataset, const NavierStokesSolver& solver)
    : dataset_(dataset), solver_(solver), steps_per_block_(steps_for(dataset.delta, solver.spec().dt)) {
  dataset_.validate();
  const FreqLattice& lattice = *solver_.lattice_ptr();
  basis_.reserve(dataset_.upsilon() * lattice.size());
  for (const Point& x : dataset_.positions)
    for (const Mode k : lattice.modes()) basis_.push_back(basis_eval(k, x));
}

std::vector<Vec2> NseLikelihood::predict(const SpectralField& v) const {
  const std::size_t m = v.size();
  std::vector<Vec2> out(dataset_.upsilon());
  for (std::size_t s = 0; s < out.size(); ++s) {
    const CVec2* psi = basis_.data() + s * m;
    double a = 0.0;
    double b = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double ur = v[i].real();
      const double ui = v[i].imag();
      a += ur * psi[i][0].real() - ui * psi[i][0].imag();
      b += ur * psi[i][1].real() - ui * psi[i][1].imag();
    }
    out[s] = {2.0 * a, 2.0 * b};
  }
  return out;
}

double NseLikelihood::advance_block(SpectralField& state, int from) const {
  solver_.evolve_steps_inplace(state, steps_per_block_);
  return block_log_lik(predict(state), from + 1, dataset_);
}

}  // namespace nsesmc
