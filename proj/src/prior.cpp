#include "nsesmc/prior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nsesmc {

PriorSpec::PriorSpec(double beta, double alpha, LatticePtr lattice, std::optional<SpectralField> mean)
    : beta_(beta), alpha_(alpha), lattice_(std::move(lattice)), mean_(std::move(mean)) {
  if (!(beta_ > 0.0) || !std::isfinite(beta_)) throw std::invalid_argument("prior beta must be > 0");
  // A^{-alpha} is trace class only for alpha > 1.
  if (!(alpha_ > 1.0) || !std::isfinite(alpha_)) throw std::invalid_argument("prior alpha must be > 1");
  if (!lattice_) throw std::invalid_argument("prior needs a lattice");
  if (mean_ && mean_->lattice() != *lattice_) throw std::invalid_argument("prior mean lattice mismatch");
  stds_.reserve(lattice_->size());
  for (const Mode k : lattice_->modes()) stds_.push_back(component_std(k));
}

PriorSpec PriorSpec::from_beta2(double beta2, double alpha, LatticePtr lattice) {
  if (!(beta2 > 0.0)) throw std::invalid_argument("prior beta2 must be > 0");
  return PriorSpec(std::sqrt(beta2), alpha, std::move(lattice));
}

double PriorSpec::component_std(Mode k) const {
  return beta_ / std::sqrt(2.0) * std::pow(k.norm(), -alpha_);
}

Window::Window(std::vector<std::size_t> indices, std::size_t lattice_size)
    : indices_(std::move(indices)), slots_(lattice_size, -1) {
  for (std::size_t s = 0; s < indices_.size(); ++s) slots_[indices_[s]] = static_cast<int>(s);
}

Window Window::square(const FreqLattice& lattice, int K) {
  if (K < 0) throw std::invalid_argument("window half-width must be >= 0");
  // For upper-half modes max(k1,k2) <= K is the same set as max(|k1|,|k2|) <= K.
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < lattice.size(); ++i)
    if (lattice[i].max_abs() <= K) idx.push_back(i);
  return Window(std::move(idx), lattice.size());
}

Window Window::from_modes(const FreqLattice& lattice, std::span<const Mode> modes) {
  std::vector<std::size_t> idx;
  for (const Mode k : modes) {
    if (k == Mode{0, 0}) throw std::invalid_argument("window contains k = 0");
    const auto i = lattice.index_of(k);
    if (!i) throw std::invalid_argument("window mode is not an upper-half lattice mode");
    if (std::find(idx.begin(), idx.end(), *i) != idx.end()) throw std::invalid_argument("duplicate window mode");
    idx.push_back(*i);
  }
  return Window(std::move(idx), lattice.size());
}

SpectralField sample_prior(const PriorSpec& spec, RngStream& rng) {
  SpectralField u(spec.lattice_ptr());
  const auto stds = spec.component_stds();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    u[i] = spec.mean(i) + stds[i] * Complex(re, im);
  }
  return u;
}

double prior_log_density_window(const SpectralField& field, const Window& window, const PriorSpec& spec) {
  if (field.lattice() != spec.lattice()) throw std::invalid_argument("field and prior lattices differ");
  const double inv_beta2 = 1.0 / (spec.beta() * spec.beta());
  double s = 0.0;
  for (const std::size_t i : window.indices()) {
    const Mode k = spec.lattice()[i];
    s += std::pow(static_cast<double>(k.norm2()), spec.alpha()) * std::norm(field[i] - spec.mean(i));
  }
  return -inv_beta2 * s;
}

}  // namespace nsesmc
