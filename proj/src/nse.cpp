#include "nsesmc/nse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace nsesmc {

SpectralField grad_perp_cos_forcing(LatticePtr lattice, Mode wave) {
  if (wave == Mode{0, 0}) return SpectralField(std::move(lattice));
  const int hw = std::max(lattice->half_width(), wave.max_abs());
  // grad_perp of cos(w.x): exponential coefficient (i/2) w_perp at +w, conjugate at -w.
  VectorSpectrum f(hw);
  const CVec2 e{Complex(0.0, -0.5 * wave.k2), Complex(0.0, 0.5 * wave.k1)};
  f(wave) = e;
  f(-wave) = {std::conj(e[0]), std::conj(e[1])};
  return leray_project(f, std::move(lattice));
}

long steps_for(double t, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be > 0");
  if (t < 0.0) throw std::invalid_argument("negative evolution time");
  const double ratio = t / dt;
  const double m = std::round(ratio);
  if (std::abs(ratio - m) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument("time " + std::to_string(t) + " is not a multiple of dt " + std::to_string(dt));
  return static_cast<long>(m);
}

NavierStokesSolver::NavierStokesSolver(SolverSpec spec) : spec_(std::move(spec)) {
  if (!(spec_.nu > 0.0)) throw std::invalid_argument("viscosity must be > 0");
  if (!(spec_.dt > 0.0)) throw std::invalid_argument("time step must be > 0");
  if (spec_.pad_factor < 2) throw std::invalid_argument("pad factor must be >= 2");
  if (!spec_.forcing.lattice_ptr()) throw std::invalid_argument("solver needs a forcing field (defines the lattice)");

  const FreqLattice& lattice = spec_.forcing.lattice();
  const int base = min_grid_size(lattice.half_width());
  n_ = spec_.dealias ? spec_.pad_factor * base : base;
  const double n2 = static_cast<double>(n_) * n_;

  tables_.reserve(lattice.size());
  for (const Mode k : lattice.modes()) {
    ModeTables t{};
    const double lambda = k.norm2();
    const double nl = spec_.nu * lambda;
    t.decay = std::exp(-nl * spec_.dt);
    t.weight = -std::expm1(-nl * spec_.dt) / nl;
    t.vel1 = -k.k2 / (kTwoPi * k.norm());
    t.vel2 = k.k1 / (kTwoPi * k.norm());
    t.vort = k.norm() / kTwoPi;
    t.proj = kTwoPi / (k.norm() * n2);
    if (k.k2 > 0) {
      t.kind = 1;
      t.slot = detail::half_offset(n_, k.k1, k.k2);
    } else if (k.k2 < 0) {
      t.kind = -1;
      t.slot = detail::half_offset(n_, -k.k1, -k.k2);
    } else {
      t.kind = 0;
      t.slot = detail::half_offset(n_, k.k1, 0);
      t.mirror_slot = detail::half_offset(n_, -k.k1, 0);
    }
    tables_.push_back(t);
  }
  // Build the plan up front rather than on the first step.
  (void)detail::RealFft2d::get(n_);
}

void NavierStokesSolver::check_lattice(const SpectralField& v) const {
  if (!v.same_lattice(spec_.forcing)) throw std::invalid_argument("field lattice does not match solver lattice");
}

void NavierStokesSolver::nonlinear_into(const SpectralField& v, std::vector<Complex>& out) const {
  const auto& fft = detail::RealFft2d::get(n_);
  auto& scratch = detail::thread_scratch(n_);
  Complex* s1 = scratch.spec[0].data();
  Complex* s2 = scratch.spec[1].data();
  Complex* sz = scratch.spec[2].data();
  scratch.spec[0].zero();
  scratch.spec[1].zero();
  scratch.spec[2].zero();

  // Velocity components and scalar vorticity d1 v2 - d2 v1 in the exponential basis.
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    const ModeTables& t = tables_[i];
    const Complex c = v[i];
    const Complex e1 = c * t.vel1;
    const Complex e2 = c * t.vel2;
    const Complex ez(-c.imag() * t.vort, c.real() * t.vort);
    if (t.kind > 0) {
      s1[t.slot] = e1;
      s2[t.slot] = e2;
      sz[t.slot] = ez;
    } else if (t.kind < 0) {
      s1[t.slot] = std::conj(e1);
      s2[t.slot] = std::conj(e2);
      sz[t.slot] = std::conj(ez);
    } else {
      s1[t.slot] = e1;
      s2[t.slot] = e2;
      sz[t.slot] = ez;
      s1[t.mirror_slot] = std::conj(e1);
      s2[t.mirror_slot] = std::conj(e2);
      sz[t.mirror_slot] = std::conj(ez);
    }
  }

  double* r1 = scratch.real[0].data();
  double* r2 = scratch.real[1].data();
  double* rz = scratch.real[2].data();
  fft.inverse(s1, r1);
  fft.inverse(s2, r2);
  fft.inverse(sz, rz);

  // (v.grad)v = grad(|v|^2/2) + zeta (-v2, v1); the gradient part is removed
  // by the projection below, so only zeta v_perp is transformed.
  const std::size_t np = fft.real_size();
  for (std::size_t j = 0; j < np; ++j) {
    const double z = rz[j];
    const double a = r1[j];
    r1[j] = -z * r2[j];
    r2[j] = z * a;
  }
  fft.forward(r1, s1);
  fft.forward(r2, s2);

  out.resize(tables_.size());
  const FreqLattice& lattice = spec_.forcing.lattice();
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    const ModeTables& t = tables_[i];
    const Mode k = lattice[i];
    Complex w1 = s1[t.slot];
    Complex w2 = s2[t.slot];
    if (t.kind < 0) {
      w1 = std::conj(w1);
      w2 = std::conj(w2);
    }
    const Complex b = (static_cast<double>(-k.k2) * w1 + static_cast<double>(k.k1) * w2) * t.proj;
    out[i] = spec_.forcing[i] - b;
  }
}

SpectralField NavierStokesSolver::nonlinear_term(const SpectralField& v) const {
  check_lattice(v);
  std::vector<Complex> out;
  nonlinear_into(v, out);
  return SpectralField(v.lattice_ptr(), std::move(out));
}

void NavierStokesSolver::etd_step_inplace(SpectralField& v) const {
  check_lattice(v);
  thread_local std::vector<Complex> nl;
  nonlinear_into(v, nl);
  for (std::size_t i = 0; i < tables_.size(); ++i) v[i] = v[i] * tables_[i].decay + nl[i] * tables_[i].weight;
}

SpectralField NavierStokesSolver::etd_step(const SpectralField& v) const {
  SpectralField out = v;
  etd_step_inplace(out);
  return out;
}

void NavierStokesSolver::evolve_steps_inplace(SpectralField& v, long steps) const {
  if (steps < 0) throw std::invalid_argument("negative step count");
  for (long s = 0; s < steps; ++s) etd_step_inplace(v);
}

SpectralField NavierStokesSolver::evolve(const SpectralField& u, double t) const {
  check_lattice(u);
  SpectralField v = u;
  evolve_steps_inplace(v, steps_for(t, spec_.dt));
  return v;
}

}  // namespace nsesmc
