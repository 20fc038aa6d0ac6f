#include "nsesmc/mcmc.hpp"

#include <cmath>
#include <stdexcept>

namespace nsesmc {

Sym2 Sym2::inverse() const {
  const double d = det();
  return {yy / d, -xy / d, xx / d};
}

Sym2 Sym2::cholesky() const {
  const double l11 = std::sqrt(xx);
  const double l21 = xy / l11;
  return {l11, l21, std::sqrt(yy - l21 * l21)};
}

WindowMoments WindowMoments::regularized(Window window, std::vector<Vec2> means, std::vector<Sym2> covs,
                                         const PriorSpec& prior, bool degenerate, double eps) {
  if (means.size() != window.size() || covs.size() != window.size())
    throw std::invalid_argument("moment arrays do not match the window");
  const auto stds = prior.component_stds();
  for (std::size_t s = 0; s < covs.size(); ++s) {
    Sym2& c = covs[s];
    const double tr = c.trace();
    bool floor = degenerate || !(tr > 0.0) || !std::isfinite(tr);
    if (!floor) {
      const double ridge = eps * tr / 2.0;
      c.xx += ridge;
      c.yy += ridge;
      floor = !(c.xx > 0.0 && c.det() > 0.0);
    }
    if (floor) {
      const double v = stds[window.indices()[s]] * stds[window.indices()[s]];
      c = {v, 0.0, v};
    }
  }
  WindowMoments m;
  m.window_ = std::move(window);
  m.means_ = std::move(means);
  m.covs_ = std::move(covs);
  m.finish();
  return m;
}

WindowMoments WindowMoments::from_prior(Window window, const PriorSpec& prior) {
  WindowMoments m;
  const auto stds = prior.component_stds();
  for (const std::size_t i : window.indices()) {
    const Complex mu = prior.mean(i);
    m.means_.push_back({mu.real(), mu.imag()});
    m.covs_.push_back({stds[i] * stds[i], 0.0, stds[i] * stds[i]});
  }
  m.window_ = std::move(window);
  m.finish();
  return m;
}

void WindowMoments::finish() {
  inverses_.clear();
  chols_.clear();
  log_dets_.clear();
  for (const Sym2& c : covs_) {
    inverses_.push_back(c.inverse());
    chols_.push_back(c.cholesky());
    log_dets_.push_back(std::log(c.det()));
  }
}

void TemperedTarget::validate() const {
  if (!likelihood || !prior) throw std::invalid_argument("tempered target needs a likelihood and a prior");
  if (!(phi >= 0.0 && phi <= 1.0)) throw std::invalid_argument("temperature must lie in [0, 1]");
  if (n < 0 || n > likelihood->horizon()) throw std::invalid_argument("target block index out of range");
}

double tempered_log_target(const ChainState& state, const TemperedTarget& target) {
  if (state.blocks() < target.n) throw std::logic_error("chain state caches do not cover the target block");
  double s = 0.0;
  for (int b = 0; b + 1 < target.n; ++b) s += state.log_liks[b];
  if (target.n > 0 && target.phi > 0.0) s += target.phi * state.log_liks[target.n - 1];
  return s;
}

void refresh(ChainState& state, const TemperedTarget& target) { target.likelihood->evaluate(state, target.n); }

SpectralField propose_pcn(const SpectralField& u, double rho, const PriorSpec& prior, RngStream& rng) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("pCN rho must lie in [0, 1]");
  const double c = std::sqrt(1.0 - rho * rho);
  const auto stds = prior.component_stds();
  SpectralField v(u.lattice_ptr());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    const Complex m0 = prior.mean(i);
    v[i] = m0 + rho * (u[i] - m0) + c * stds[i] * Complex(z1, z2);
  }
  return v;
}

SpectralField propose_windowed(const SpectralField& u, double rho_L, double rho_H, const WindowMoments& moments,
                               const PriorSpec& prior, RngStream& rng) {
  if (!(rho_L >= 0.0 && rho_L <= 1.0) || !(rho_H >= 0.0 && rho_H <= 1.0))
    throw std::invalid_argument("kernel rho values must lie in [0, 1]");
  const double cl = std::sqrt(1.0 - rho_L * rho_L);
  const double ch = std::sqrt(1.0 - rho_H * rho_H);
  const auto stds = prior.component_stds();
  const Window& w = moments.window();
  SpectralField v(u.lattice_ptr());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    const int s = w.slot(i);
    if (s >= 0) {
      const Vec2& m = moments.means()[s];
      const Sym2& l = moments.cholesky()[s];
      const double re = m[0] + rho_L * (u[i].real() - m[0]) + cl * (l.xx * z1);
      const double im = m[1] + rho_L * (u[i].imag() - m[1]) + cl * (l.xy * z1 + l.yy * z2);
      v[i] = Complex(re, im);
    } else {
      const Complex m0 = prior.mean(i);
      v[i] = m0 + rho_H * (u[i] - m0) + ch * stds[i] * Complex(z1, z2);
    }
  }
  return v;
}

namespace {

// log Q(from -> to) without its normalizing constant.
double log_q(const SpectralField& from, const SpectralField& to, double rho_L, const WindowMoments& moments) {
  const Window& w = moments.window();
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const std::size_t i = w.indices()[j];
    const Vec2& m = moments.means()[j];
    const double a = to[i].real() - m[0] - rho_L * (from[i].real() - m[0]);
    const double b = to[i].imag() - m[1] - rho_L * (from[i].imag() - m[1]);
    s += moments.inverses()[j].quad(a, b);
  }
  return -s / (2.0 * (1.0 - rho_L * rho_L));
}

}  // namespace

double windowed_log_correction(const SpectralField& u, const SpectralField& v, double rho_L,
                               const WindowMoments& moments, const PriorSpec& prior) {
  const Window& w = moments.window();
  if (w.empty()) return 0.0;
  const double prior_part = prior_log_density_window(v, w, prior) - prior_log_density_window(u, w, prior);
  // rho_L = 1 leaves the window coordinates fixed; the proposal is then symmetric there.
  if (rho_L >= 1.0) return prior_part;
  return prior_part + log_q(v, u, rho_L, moments) - log_q(u, v, rho_L, moments);
}

double pcn_log_ratio(const ChainState& current, const ChainState& proposal, const TemperedTarget& target) {
  const double a = tempered_log_target(proposal, target);
  if (a == -INFINITY) return -INFINITY;
  return a - tempered_log_target(current, target);
}

double windowed_log_ratio(const ChainState& current, const ChainState& proposal, double rho_L,
                          const WindowMoments& moments, const TemperedTarget& target) {
  const double lik = pcn_log_ratio(current, proposal, target);
  if (lik == -INFINITY) return -INFINITY;
  return lik + windowed_log_correction(current.field, proposal.field, rho_L, moments, *target.prior);
}

bool metropolis_accept(double log_ratio, RngStream& rng) {
  const double u = rng.uniform();
  if (std::isnan(log_ratio)) return false;
  if (log_ratio >= 0.0) return true;
  return std::log(u) < log_ratio;
}

bool pcn_step(ChainState& state, double rho, const TemperedTarget& target, RngStream& rng) {
  ChainState prop = ChainState::at_origin(propose_pcn(state.field, rho, *target.prior, rng));
  target.likelihood->evaluate(prop, target.n);
  if (!metropolis_accept(pcn_log_ratio(state, prop, target), rng)) return false;
  state = std::move(prop);
  return true;
}

bool windowed_step(ChainState& state, double rho_L, double rho_H, const WindowMoments& moments,
                   const TemperedTarget& target, RngStream& rng) {
  ChainState prop =
      ChainState::at_origin(propose_windowed(state.field, rho_L, rho_H, moments, *target.prior, rng));
  target.likelihood->evaluate(prop, target.n);
  if (!metropolis_accept(windowed_log_ratio(state, prop, rho_L, moments, target), rng)) return false;
  state = std::move(prop);
  return true;
}

int mutate(ChainState& state, int M, const KernelParams& params, const TemperedTarget& target, RngStream& rng) {
  if (M < 0) throw std::invalid_argument("number of mutation steps must be >= 0");
  if (params.kind == KernelKind::kWindowed && !params.moments)
    throw std::invalid_argument("windowed kernel needs window moments");
  int accepted = 0;
  for (int m = 0; m < M; ++m) {
    const bool a = params.kind == KernelKind::kPcn
                       ? pcn_step(state, params.rho, target, rng)
                       : windowed_step(state, params.rho_L, params.rho_H, *params.moments, target, rng);
    accepted += a ? 1 : 0;
  }
  return accepted;
}

long run_pcn_chain(ChainState& state, double rho, long iterations, const TemperedTarget& target, RngStream& rng,
                   const std::function<void(long, const ChainState&, bool)>& observer) {
  target.validate();
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (state.blocks() != target.n) refresh(state, target);
  long accepted = 0;
  for (long it = 0; it < iterations; ++it) {
    const bool a = pcn_step(state, rho, target, rng);
    accepted += a ? 1 : 0;
    if (observer) observer(it, state, a);
  }
  return accepted;
}

}  // namespace nsesmc
