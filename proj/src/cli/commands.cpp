#include "nsesmc/cli/commands.hpp"

#include <boost/version.hpp>
#include <chrono>
#include <cmath>
#include <fftw3.h>

#include "json.hpp"
#include "nsesmc/diag.hpp"
#include "nsesmc/io.hpp"
#include "nsesmc/mcmc.hpp"
#include "nsesmc/smc.hpp"

namespace nsesmc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void write_manifest(const fs::path& dir, const std::string& command, const ExperimentConfig& config,
                    double wall_ms, std::uint64_t evolve_calls, json extra = json::object()) {
  json m = {{"tool", "nsesmc"},
            {"version", kVersion},
            {"command", command},
            {"seed", config.seed},
            {"wall_ms", wall_ms},
            {"evolve_calls", evolve_calls},
            {"fftw", std::string(fftw_version)},
            {"boost", BOOST_LIB_VERSION},
            {"compiler", __VERSION__}};
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

void write_resolved_config(const fs::path& dir, const ExperimentConfig& config) {
  write_text(dir / "config.ini", render_config(config));
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

SpectralField weighted_mean(std::span<const ChainState> particles, std::span<const double> weights, bool evolved) {
  SpectralField m((evolved ? particles[0].evolved : particles[0].field).lattice_ptr());
  for (std::size_t j = 0; j < particles.size(); ++j) {
    const SpectralField& f = evolved ? particles[j].evolved : particles[j].field;
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += weights[j] * f[i];
  }
  return m;
}

std::string xi_header(std::span<const Mode> modes) {
  std::string s;
  for (const Mode k : modes) {
    const std::string tag = std::to_string(k.k1) + "_" + std::to_string(k.k2);
    s += ",re_" + tag + ",im_" + tag;
  }
  return s;
}

}  // namespace

int cmd_synth(const ExperimentConfig& config, const fs::path& out_dir, std::ostream& log) {
  const auto t0 = Clock::now();
  const LatticePtr lattice = config.lattice();
  const PriorSpec prior = config.prior_spec(lattice);
  const NavierStokesSolver solver(config.solver_spec(lattice));

  RngStream truth_rng(config.seed, StreamTag::kTruth);
  const SpectralField truth = sample_prior(prior, truth_rng);
  RngStream noise_rng(config.seed, StreamTag::kNoise);
  Dataset d = synthesize(truth, config.positions(), config.observation.delta, config.observation.T,
                         std::sqrt(config.observation.gamma2), solver, noise_rng);
  d.provenance.seed = config.seed;
  d.provenance.forcing = config.solver.forcing == "grad-perp-cos"
                             ? "grad-perp-cos " + std::to_string(config.solver.forcing_wave.k1) + "," +
                                   std::to_string(config.solver.forcing_wave.k2)
                             : config.solver.forcing == "file" ? "file " + config.solver.forcing_file : "none";

  fs::create_directories(out_dir);
  write_dataset_json(out_dir / "dataset.json", d);
  write_field_csv(out_dir / "truth.csv", truth);
  write_resolved_config(out_dir, config);
  const long steps = steps_for(config.observation.delta, config.solver.dt) * config.observation.T;
  write_manifest(out_dir, "synth", config, ms_since(t0), config.observation.T > 0 ? 1 : 0, {{"etd_steps", steps}});
  log << "synth: " << d.horizon << " blocks x " << d.upsilon() << " positions written to " << out_dir.string()
      << "\n";
  return kExitOk;
}

void check_dataset_consistency(const ExperimentConfig& config, const Dataset& d) {
  const auto& pv = d.provenance;
  const auto fail = [](const std::string& m) { throw ConfigError("dataset inconsistent with config: " + m); };
  if (pv.half_width != config.solver.half_width) fail("lattice half-width");
  if (!close(pv.nu, config.solver.nu)) fail("viscosity");
  if (!close(pv.dt, config.solver.dt)) fail("time step");
  if (pv.pad_factor != config.solver.pad_factor) fail("pad factor");
  if (!close(d.delta, config.observation.delta)) fail("observation spacing delta");
  if (d.horizon != config.observation.T) fail("horizon T");
  if (!close(d.gamma * d.gamma, config.observation.gamma2)) fail("noise level gamma2");
  try {
    (void)steps_for(d.delta, config.solver.dt);
  } catch (const std::invalid_argument&) {
    fail("dt does not divide delta");
  }
}

namespace {

Dataset load_dataset(const ExperimentConfig& config, const fs::path& path) {
  Dataset d;
  try {
    d = read_dataset_json(path);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  check_dataset_consistency(config, d);
  return d;
}

}  // namespace

int cmd_run_smc(const ExperimentConfig& config, const fs::path& dataset_path, const fs::path& out_dir, int workers,
                std::ostream& log) {
  const auto t0 = Clock::now();
  const Dataset data = load_dataset(config, dataset_path);
  const LatticePtr lattice = config.lattice();
  const PriorSpec prior = config.prior_spec(lattice);
  const NavierStokesSolver solver(config.solver_spec(lattice, dataset_path.parent_path()));
  const NseLikelihood likelihood(data, solver);

  SmcConfig sc = config.smc;
  sc.seed = config.seed;
  sc.workers = workers;

  fs::create_directories(out_dir);
  write_resolved_config(out_dir, config);
  std::string temper = temper_csv_header(sc.tracked);
  std::string timing = "n,r,wall_ms\n";
  SmcHooks hooks;
  hooks.on_row = [&](const TemperRow& row) {
    temper += temper_csv_line(row);
    timing += std::to_string(row.n) + "," + std::to_string(row.r) + "," + format_double(row.wall_ms) + "\n";
    write_text(out_dir / "temper.csv", temper);
    log << "n=" << row.n << " r=" << row.r << " phi=" << row.phi << " ess=" << row.ess << " acc=" << row.acc_mean
        << "\n";
  };
  if (config.snapshots)
    hooks.on_stage = [&](int n, const Ensemble& e) {
      write_snapshot(out_dir / "snapshots" / ("n_" + std::to_string(n)), e.particles, e.weights);
    };

  SmcResult res;
  try {
    res = run_smc(sc, likelihood, prior, hooks);
  } catch (const std::exception& e) {
    write_text(out_dir / "failure.txt", std::string(e.what()) + "\n" + temper);
    throw;
  }
  const Ensemble& ens = res.ensemble;
  write_text(out_dir / "temper.csv", temper);
  write_text(out_dir / "timing.csv", timing);
  write_snapshot(out_dir / "final", ens.particles, ens.weights);

  const MarginalSummary summary = summarize_ensemble(ens.particles, ens.weights, prior);
  write_summary_csv(out_dir / "summary.csv", summary);
  write_heat_map_csv(out_dir / "heatmap.csv", ratio_heat_map(summary, lattice->half_width()),
                     lattice->half_width());

  const SpectralField mean0 = weighted_mean(ens.particles, ens.weights, false);
  write_field_csv(out_dir / "posterior_mean.csv", mean0);
  const SpectralField pushed = solver.evolve(mean0, data.delta * data.horizon);
  write_field_csv(out_dir / "posterior_mean_pushed.csv", pushed);
  write_field_csv(out_dir / "pushed_mean.csv", weighted_mean(ens.particles, ens.weights, true));
  const int g = std::max(64, min_grid_size(lattice->half_width()));
  write_scalar_grid_csv(out_dir / "vorticity_mean_0.csv", vorticity(mean0, g));
  write_scalar_grid_csv(out_dir / "vorticity_mean_T.csv", vorticity(pushed, g));

  // Per-particle standardized coefficients at the tracked modes, for density estimates.
  const auto tracked = resolve_tracked(*lattice, sc.tracked);
  std::vector<Mode> present;
  std::vector<std::size_t> idx;
  for (std::size_t t = 0; t < tracked.size(); ++t)
    if (tracked[t]) {
      present.push_back((*lattice)[*tracked[t]]);
      idx.push_back(*tracked[t]);
    }
  std::string samples = "particle,weight" + xi_header(present) + "\n";
  for (std::size_t j = 0; j < ens.size(); ++j) {
    const auto xi = standardize(ens.particles[j].field, prior);
    samples += std::to_string(j) + "," + format_double(ens.weights[j]);
    for (const std::size_t i : idx) samples += "," + format_double(xi[i].real()) + "," + format_double(xi[i].imag());
    samples += "\n";
  }
  write_text(out_dir / "samples.csv", samples);

  const std::uint64_t predicted = predicted_evolve_calls(sc, data.horizon, res.log.size());
  write_manifest(out_dir, "run-smc", config, ms_since(t0), res.evolve_calls,
                 {{"predicted_evolve_calls", predicted},
                  {"workers", workers},
                  {"tempering_steps", res.log.size()},
                  {"flagged_modes", summary.flagged_modes().size()}});
  log << "run-smc: " << res.log.size() << " tempering steps, " << res.evolve_calls << " forward solves\n";
  if (res.evolve_calls != predicted) {
    log << "run-smc: forward-solve count " << res.evolve_calls << " differs from prediction " << predicted << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_run_mcmc(const ExperimentConfig& config, const fs::path& dataset_path, const fs::path& out_dir,
                 std::ostream& log) {
  const auto t0 = Clock::now();
  const Dataset data = load_dataset(config, dataset_path);
  const LatticePtr lattice = config.lattice();
  const PriorSpec prior = config.prior_spec(lattice);
  const NavierStokesSolver solver(config.solver_spec(lattice, dataset_path.parent_path()));
  const NseLikelihood likelihood(data, solver);
  const McmcSection& mc = config.mcmc;

  std::vector<Mode> modes;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < lattice->size(); ++i)
    if ((*lattice)[i].max_abs() <= mc.record_half_width) {
      modes.push_back((*lattice)[i]);
      idx.push_back(i);
    }

  RngStream init_rng(config.seed, StreamTag::kChain, {0});
  RngStream rng(config.seed, StreamTag::kChain, {1});
  ChainState state = ChainState::at_origin(sample_prior(prior, init_rng));
  const TemperedTarget target{&likelihood, &prior, data.horizon, 1.0};

  fs::create_directories(out_dir);
  write_resolved_config(out_dir, config);
  std::string chain = "iteration" + xi_header(modes) + "\n";
  std::string acc = "iteration,accepted_total,window_rate\n";
  std::vector<std::vector<double>> series(2 * modes.size());
  SpectralField sum(lattice);
  long recorded = 0;
  long window_acc = 0;
  long total_acc = 0;
  const auto observer = [&](long it, const ChainState& s, bool a) {
    window_acc += a ? 1 : 0;
    total_acc += a ? 1 : 0;
    if ((it + 1) % mc.thin != 0) return;
    acc += std::to_string(it + 1) + "," + std::to_string(total_acc) + "," +
           format_double(static_cast<double>(window_acc) / mc.thin) + "\n";
    window_acc = 0;
    if (it < mc.burn_in) return;
    const auto xi = standardize(s.field, prior);
    chain += std::to_string(it + 1);
    for (std::size_t m = 0; m < idx.size(); ++m) {
      const Complex z = xi[idx[m]];
      chain += "," + format_double(z.real()) + "," + format_double(z.imag());
      series[2 * m].push_back(z.real());
      series[2 * m + 1].push_back(z.imag());
    }
    chain += "\n";
    sum += s.field;
    ++recorded;
  };
  const long accepted = run_pcn_chain(state, mc.rho, mc.iterations, target, rng, observer);
  write_text(out_dir / "chain.csv", chain);
  write_text(out_dir / "acceptance.csv", acc);

  if (recorded > 0) {
    sum *= 1.0 / static_cast<double>(recorded);
    write_field_csv(out_dir / "posterior_mean.csv", sum);
  }
  const auto n_rec = series.empty() ? 0 : series[0].size();
  if (n_rec > static_cast<std::size_t>(mc.max_lag)) {
    std::vector<std::vector<double>> acfs;
    for (const auto& s : series) acfs.push_back(autocorrelation(s, mc.max_lag));
    std::string a = "lag" + xi_header(modes) + "\n";
    for (int l = 0; l <= mc.max_lag; ++l) {
      a += std::to_string(l * mc.thin);
      for (const auto& c : acfs) a += "," + format_double(c[l]);
      a += "\n";
    }
    write_text(out_dir / "acf.csv", a);
  }
  if (n_rec >= 40) {
    std::string s = "k1,k2,mean_re,mean_im,std_re,std_im,se_mean_re,se_mean_im\n";
    for (std::size_t m = 0; m < modes.size(); ++m) {
      double st[2][3];
      for (int c = 0; c < 2; ++c) {
        const auto& x = series[2 * m + c];
        double mu = 0.0;
        for (const double v : x) mu += v;
        mu /= static_cast<double>(x.size());
        double var = 0.0;
        for (const double v : x) var += (v - mu) * (v - mu);
        var /= static_cast<double>(x.size());
        st[c][0] = mu;
        st[c][1] = std::sqrt(var);
        st[c][2] = batch_means_se(x, 20);
      }
      s += std::to_string(modes[m].k1) + "," + std::to_string(modes[m].k2) + "," + format_double(st[0][0]) + "," +
           format_double(st[1][0]) + "," + format_double(st[0][1]) + "," + format_double(st[1][1]) + "," +
           format_double(st[0][2]) + "," + format_double(st[1][2]) + "\n";
    }
    write_text(out_dir / "summary.csv", s);
  }
  const double rate = mc.iterations > 0 ? static_cast<double>(accepted) / mc.iterations : 1.0;
  write_manifest(out_dir, "run-mcmc", config, ms_since(t0), likelihood.evolve_calls(),
                 {{"acceptance_rate", rate}, {"recorded", recorded}});
  log << "run-mcmc: " << mc.iterations << " steps, acceptance " << rate << "\n";
  return kExitOk;
}

int cmd_summarize(const ExperimentConfig& config, const fs::path& snapshot_dir, const fs::path& out_dir,
                  std::ostream& log) {
  const LatticePtr lattice = config.lattice();
  const PriorSpec prior = config.prior_spec(lattice);
  Snapshot snap;
  try {
    snap = read_snapshot(snapshot_dir, lattice);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const MarginalSummary summary = summarize_fields(snap.fields, snap.weights, prior);
  fs::create_directories(out_dir);
  write_summary_csv(out_dir / "summary.csv", summary);
  write_heat_map_csv(out_dir / "heatmap.csv", ratio_heat_map(summary, lattice->half_width()), lattice->half_width());
  std::string flagged = "k1,k2,ratio\n";
  for (const auto& r : summary.rows)
    if (r.flagged) flagged += std::to_string(r.k.k1) + "," + std::to_string(r.k.k2) + "," + format_double(r.ratio_combined) + "\n";
  write_text(out_dir / "flagged.csv", flagged);

  const Window w = Window::square(*lattice, config.smc.K);
  std::size_t outside = 0;
  for (std::size_t i = 0; i < summary.rows.size(); ++i)
    if (summary.rows[i].flagged && w.slot(i) < 0) ++outside;
  log << "summarize: " << summary.flagged_modes().size() << " modes with std ratio < " << summary.threshold << " ("
      << summary.flagged_modes_re().size() << " by real part), " << outside << " outside the K=" << config.smc.K
      << " window\n";
  return kExitOk;
}

int cmd_check(const ExperimentConfig& config, const CheckOptions& options, std::ostream& log) {
  const auto results = run_checks(config, options);
  bool ok = true;
  for (const auto& r : results) {
    log << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    ok = ok && r.pass;
  }
  return ok ? kExitOk : kExitCheck;
}

}  // namespace nsesmc::cli
