#include <cmath>
#include <sstream>

#include "nsesmc/cli/commands.hpp"
#include "nsesmc/io.hpp"
#include "nsesmc/nse.hpp"
#include "nsesmc/prior.hpp"
#include "nsesmc/smc.hpp"

namespace nsesmc::cli {

SpectralField direct_nonlinear_term(const SpectralField& v, const SpectralField& forcing) {
  const FreqLattice& lattice = v.lattice();
  const int H = lattice.half_width();
  // Full mirrored set of exponential-basis velocity coefficients w(p).
  struct Term {
    Mode p;
    CVec2 w;
  };
  std::vector<Term> full;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const Mode k = lattice[i];
    const double s = 1.0 / (kTwoPi * k.norm());
    const CVec2 w{v[i] * (-k.k2 * s), v[i] * (k.k1 * s)};
    full.push_back({k, w});
    full.push_back({-k, {std::conj(w[0]), std::conj(w[1])}});
  }
  SpectralField out(v.lattice_ptr());
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const Mode k = lattice[i];
    CVec2 c{};
    for (const Term& a : full) {
      const Mode q{k.k1 - a.p.k1, k.k2 - a.p.k2};
      if (q.max_abs() > H || q == Mode{0, 0}) continue;
      for (const Term& b : full) {
        if (!(b.p == q)) continue;
        // (w(p) . i q) w(q)
        const Complex dot = Complex(0.0, 1.0) * (a.w[0] * static_cast<double>(q.k1) + a.w[1] * static_cast<double>(q.k2));
        c[0] += dot * b.w[0];
        c[1] += dot * b.w[1];
      }
    }
    const Complex b = kTwoPi * (static_cast<double>(-k.k2) * c[0] + static_cast<double>(k.k1) * c[1]) / k.norm();
    out[i] = forcing[i] - b;
  }
  return out;
}

namespace {

double max_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double l2_diff(const SpectralField& a, const SpectralField& b) { return std::sqrt((a - b).energy()); }

std::string num(double x) { return format_double(x); }

CheckResult check_roundtrip(const ExperimentConfig& config) {
  const LatticePtr lattice = config.lattice();
  const PriorSpec prior = config.prior_spec(lattice);
  RngStream rng(config.seed, StreamTag::kTest, {1});
  double worst = 0.0;
  for (const int size : {min_grid_size(lattice->half_width()), 2 * min_grid_size(lattice->half_width())}) {
    const SpectralField f = sample_prior(prior, rng);
    worst = std::max(worst, max_diff(from_physical(to_physical(f, size), lattice), f));
  }
  return {"spectral round-trip", worst < 1e-12, "max error " + num(worst)};
}

CheckResult check_single_mode(const ExperimentConfig& config) {
  const LatticePtr lattice = make_lattice(std::min(config.solver.half_width, 8));
  SolverSpec spec;
  spec.nu = config.solver.nu;
  spec.dt = config.solver.dt;
  spec.pad_factor = config.solver.pad_factor;
  spec.forcing = SpectralField(lattice);
  const NavierStokesSolver solver(spec);
  const Mode k{1, 2};
  SpectralField u(lattice);
  u[*lattice->index_of(k)] = Complex(0.7, -0.3);
  const SpectralField start = u;
  solver.evolve_steps_inplace(u, 1000);
  const double expected = std::exp(-spec.nu * k.norm2() * 1000 * spec.dt);
  const double err = max_diff(u, expected * start) / (expected * std::abs(start[*lattice->index_of(k)]));
  return {"single-mode decay", err < 1e-10, "relative error " + num(err) + " after 1000 steps"};
}

CheckResult check_convolution(const ExperimentConfig& config, bool dealias) {
  const int H = 8;
  const LatticePtr lattice = make_lattice(H);
  SolverSpec spec;
  spec.nu = config.solver.nu;
  spec.dt = config.solver.dt;
  spec.forcing = SpectralField(lattice);
  spec.dealias = dealias;
  const NavierStokesSolver solver(spec);
  RngStream rng(config.seed, StreamTag::kTest, {2});
  std::vector<std::size_t> high;
  for (std::size_t i = 0; i < lattice->size(); ++i)
    if ((*lattice)[i].max_abs() > H / 2) high.push_back(i);
  double worst = 0.0;
  for (int c = 0; c < 20; ++c) {
    SpectralField v(lattice);
    for (int m = 0; m < 2; ++m) {
      const std::size_t i = high[static_cast<std::size_t>(rng.uniform() * high.size())];
      v[i] = Complex(rng.normal(), rng.normal());
    }
    worst = std::max(worst, max_diff(solver.nonlinear_term(v), direct_nonlinear_term(v, spec.forcing)));
  }
  return {std::string("nonlinear term vs direct convolution") + (dealias ? "" : " (dealiasing disabled)"),
          worst < 1e-10, "max error " + num(worst)};
}

CheckResult check_ess() {
  const std::vector<double> u(7, 1.0 / 7.0);
  const std::vector<double> w{0.5, 0.25, 0.25};
  const std::vector<double> one{0.0, 1.0, 0.0};
  const double e1 = ess(u);
  const double e2 = ess(w);
  const double e3 = ess(one);
  const bool ok = std::abs(e1 - 7.0) < 1e-12 && std::abs(e2 - 8.0 / 3.0) < 1e-12 && std::abs(e3 - 1.0) < 1e-12;
  return {"ESS identities", ok, "uniform " + num(e1) + ", (1/2,1/4,1/4) " + num(e2) + ", one-hot " + num(e3)};
}

CheckResult check_two_particle(const ExperimentConfig& config) {
  RngStream rng(config.seed, StreamTag::kTest, {3});
  const double tol = config.smc.bisection_tol * 2.0;
  double worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    const double target = 1.05 + 0.9 * rng.uniform();
    const double a = target - 1.0;
    const double r = (1.0 - std::sqrt(1.0 - a * a)) / a;
    const double d = -std::log(r) * (1.5 + 18.5 * rng.uniform());
    const std::vector<double> ll{0.0, -d};
    const auto sol = next_temperature(ll, 0.0, target, tol, config.smc.bisection_max_iter);
    worst = std::max(worst, std::abs(ess(reweight(ll, 0.0, sol.phi)) - target));
  }
  return {"two-particle temperature solve", worst <= tol, "max |ESS - target| " + num(worst) + " (tol " + num(tol) + ")"};
}

CheckResult check_dt_convergence(const ExperimentConfig& config) {
  const LatticePtr lattice = config.lattice();
  const PriorSpec prior = config.prior_spec(lattice);
  RngStream rng(config.seed, StreamTag::kTest, {4});
  const SpectralField u = sample_prior(prior, rng);
  const double t = config.observation.delta;
  const auto run = [&](double dt) {
    SolverSpec s = config.solver_spec(lattice);
    s.dt = dt;
    return NavierStokesSolver(s).evolve(u, t);
  };
  const double dt = config.solver.dt;
  const SpectralField ref = run(dt / 64.0);
  const double e1 = l2_diff(run(dt), ref);
  const double e2 = l2_diff(run(dt / 2.0), ref);
  const double ratio = e1 / e2;
  return {"dt self-convergence", ratio >= 1.7 && ratio <= 2.3,
          "error(dt) " + num(e1) + ", error(dt/2) " + num(e2) + ", ratio " + num(ratio)};
}

}  // namespace

std::vector<CheckResult> run_checks(const ExperimentConfig& config, const CheckOptions& options) {
  std::vector<CheckResult> out;
  const auto guarded = [&](const std::string& name, auto&& fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("threw: ") + e.what()});
    }
  };
  guarded("spectral round-trip", [&] { return check_roundtrip(config); });
  guarded("single-mode decay", [&] { return check_single_mode(config); });
  guarded("nonlinear term vs direct convolution", [&] { return check_convolution(config, options.dealias); });
  guarded("ESS identities", [] { return check_ess(); });
  guarded("two-particle temperature solve", [&] { return check_two_particle(config); });
  guarded("dt self-convergence", [&] { return check_dt_convergence(config); });
  return out;
}

}  // namespace nsesmc::cli
