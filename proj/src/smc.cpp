#include "nsesmc/smc.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace nsesmc {

double ess(std::span<const double> weights) {
  double s = 0.0;
  double q = 0.0;
  for (const double w : weights) {
    s += w;
    q += w * w;
  }
  if (!(q > 0.0)) throw std::invalid_argument("ESS of all-zero weights is undefined");
  return s * s / q;
}

std::vector<double> reweight(std::span<const double> log_liks, double phi_prev, double phi,
                             std::span<const double> base) {
  if (!(phi >= phi_prev)) throw std::invalid_argument("reweight needs phi >= phi_prev");
  if (!base.empty() && base.size() != log_liks.size()) throw std::invalid_argument("base weight count mismatch");
  const double dphi = phi - phi_prev;
  const std::size_t n = log_liks.size();
  std::vector<double> lw(n);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    double v = base.empty() ? 0.0 : (base[j] > 0.0 ? std::log(base[j]) : -INFINITY);
    if (dphi > 0.0 && v != -INFINITY) {
      const double l = log_liks[j];
      v = std::isnan(l) || l == -INFINITY ? -INFINITY : v + dphi * l;
    }
    lw[j] = v;
    mx = std::max(mx, v);
  }
  if (!(mx > -INFINITY) || !std::isfinite(mx)) throw std::runtime_error("ensemble collapse: every weight vanished");
  double s = 0.0;
  for (double& v : lw) {
    v = std::exp(v - mx);
    s += v;
  }
  for (double& v : lw) v /= s;
  return lw;
}

TemperatureSolve next_temperature(std::span<const double> log_liks, double phi_prev, double n_thresh, double tol,
                                  int max_iter, std::span<const double> base) {
  if (!(phi_prev < 1.0)) throw std::invalid_argument("next_temperature needs phi_prev < 1");
  const auto ess_at = [&](double phi) { return ess(reweight(log_liks, phi_prev, phi, base)); };
  const double e1 = ess_at(1.0);
  if (e1 >= n_thresh) return {1.0, e1, 0, false};
  if (ess_at(phi_prev) < n_thresh) return {1.0, e1, 0, true};

  double lo = phi_prev;
  double hi = 1.0;
  double e_lo = 0.0;
  double mid = hi;
  double e_mid = e1;
  for (int it = 1; it <= max_iter; ++it) {
    mid = 0.5 * (lo + hi);
    e_mid = ess_at(mid);
    if (std::abs(e_mid - n_thresh) <= tol) return {mid, e_mid, it, false};
    if (e_mid > n_thresh) {
      lo = mid;
      e_lo = e_mid;
    } else {
      hi = mid;
    }
  }
  // Prefer the side that keeps ESS above the threshold, as long as it moved.
  if (lo > phi_prev) return {lo, e_lo, max_iter, false};
  return {mid, e_mid, max_iter, false};
}

namespace {

std::vector<double> cumulative(std::span<const double> weights) {
  if (weights.empty()) throw std::invalid_argument("cannot resample an empty ensemble");
  std::vector<double> c(weights.size());
  double s = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (!(weights[j] >= 0.0)) throw std::invalid_argument("negative or NaN weight");
    s += weights[j];
    c[j] = s;
  }
  if (!(s > 0.0)) throw std::invalid_argument("cannot resample all-zero weights");
  return c;
}

std::size_t locate(const std::vector<double>& c, double x) {
  const auto it = std::upper_bound(c.begin(), c.end(), x);
  if (it == c.end()) {
    // x at the rounding edge of the total: take the last positive-weight index.
    std::size_t j = c.size() - 1;
    while (j > 0 && c[j] == c[j - 1]) --j;
    return j;
  }
  return static_cast<std::size_t>(it - c.begin());
}

}  // namespace

std::vector<std::size_t> resample_multinomial(std::span<const double> weights, RngStream& rng) {
  const auto c = cumulative(weights);
  const double total = c.back();
  std::vector<std::size_t> out(weights.size());
  for (auto& o : out) o = locate(c, rng.uniform() * total);
  return out;
}

std::vector<std::size_t> resample_systematic(std::span<const double> weights, RngStream& rng) {
  const auto c = cumulative(weights);
  const double total = c.back();
  const std::size_t n = weights.size();
  const double u0 = rng.uniform();
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = locate(c, (u0 + static_cast<double>(i)) / static_cast<double>(n) * total);
  return out;
}

WindowMoments window_moments(std::span<const ChainState> particles, std::span<const double> weights,
                             const Window& window, const PriorSpec& prior, double eps) {
  if (particles.size() != weights.size()) throw std::invalid_argument("particle and weight counts differ");
  const std::size_t positive =
      static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(), [](double w) { return w > 0.0; }));
  std::vector<Vec2> means(window.size(), Vec2{0.0, 0.0});
  std::vector<Sym2> covs(window.size());
  for (std::size_t s = 0; s < window.size(); ++s) {
    const std::size_t i = window.indices()[s];
    double mr = 0.0;
    double mi = 0.0;
    for (std::size_t j = 0; j < particles.size(); ++j) {
      mr += weights[j] * particles[j].field[i].real();
      mi += weights[j] * particles[j].field[i].imag();
    }
    Sym2 c;
    for (std::size_t j = 0; j < particles.size(); ++j) {
      const double a = particles[j].field[i].real() - mr;
      const double b = particles[j].field[i].imag() - mi;
      c.xx += weights[j] * a * a;
      c.xy += weights[j] * a * b;
      c.yy += weights[j] * b * b;
    }
    means[s] = {mr, mi};
    covs[s] = c;
  }
  return WindowMoments::regularized(window, std::move(means), std::move(covs), prior, positive <= 1, eps);
}

std::vector<std::optional<std::size_t>> resolve_tracked(const FreqLattice& lattice, std::span<const Mode> modes) {
  std::vector<std::optional<std::size_t>> out;
  out.reserve(modes.size());
  for (const Mode k : modes) {
    if (k == Mode{0, 0}) {
      out.push_back(std::nullopt);
      continue;
    }
    out.push_back(lattice.index_of(in_upper_half(k) ? k : -k));
  }
  return out;
}

std::vector<double> jitter_statistic(std::span<const SpectralField> pre, std::span<const SpectralField> post,
                                     std::span<const std::optional<std::size_t>> tracked,
                                     std::span<const double> weights) {
  if (pre.size() != post.size()) throw std::invalid_argument("pre and post populations differ in size");
  if (!weights.empty() && weights.size() != pre.size()) throw std::invalid_argument("weight count mismatch");
  const std::size_t n = pre.size();
  const double uniform = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  const auto w = [&](std::size_t j) { return weights.empty() ? uniform : weights[j]; };
  std::vector<double> out;
  out.reserve(tracked.size());
  for (const auto& idx : tracked) {
    if (!idx || n == 0) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const std::size_t i = *idx;
    Complex mu{};
    double wsum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      mu += w(j) * pre[j][i];
      wsum += w(j);
    }
    mu /= wsum;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      num += w(j) * std::norm(post[j][i] - pre[j][i]);
      den += w(j) * std::norm(pre[j][i] - mu);
    }
    out.push_back(den > 0.0 ? num / (2.0 * den) : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

std::vector<Mode> default_tracked_modes() { return {{0, 1}, {1, 1}, {2, 1}, {4, 4}, {9, 9}, {-7, 7}, {0, -1}}; }

void SmcConfig::validate() const {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (!(N_thresh >= 1.0 && N_thresh <= N)) throw std::invalid_argument("N_thresh must lie in [1, N]");
  if (M < 0) throw std::invalid_argument("M must be >= 0");
  if (K < 0) throw std::invalid_argument("K must be >= 0");
  for (const double r : {rho_L, rho_H, rho})
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("kernel rho values must lie in [0, 1]");
  if (!(bisection_tol > 0.0)) throw std::invalid_argument("bisection tolerance must be > 0");
  if (bisection_max_iter < 1) throw std::invalid_argument("bisection iterations must be >= 1");
  if (!(cov_eps >= 0.0)) throw std::invalid_argument("covariance ridge must be >= 0");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
}

std::uint64_t predicted_evolve_calls(const SmcConfig& config, int horizon, std::size_t sweeps) {
  const auto n = static_cast<std::uint64_t>(config.N);
  return n * static_cast<std::uint64_t>(horizon) + n * static_cast<std::uint64_t>(config.M) * sweeps;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto run = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        body(i);
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

SmcResult run_smc(const SmcConfig& config, const BlockLikelihood& likelihood, const PriorSpec& prior,
                  const SmcHooks& hooks) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t calls0 = likelihood.evolve_calls();
  const std::size_t N = static_cast<std::size_t>(config.N);
  const int T = likelihood.horizon();
  const Window window = Window::square(prior.lattice(), config.K);
  const auto tracked = resolve_tracked(prior.lattice(), config.tracked);
  const double tol = config.bisection_tol * config.N;
  RngStream coordinator(config.seed, StreamTag::kResample);

  SmcResult result;
  Ensemble& ens = result.ensemble;
  ens.particles.resize(N);
  parallel_for(N, config.workers, [&](std::size_t j) {
    RngStream rng(config.seed, StreamTag::kInit, {j});
    ens.particles[j] = ChainState::at_origin(sample_prior(prior, rng));
  });
  ens.weights.assign(N, 1.0 / static_cast<double>(N));
  if (hooks.on_stage) hooks.on_stage(0, ens);

  std::vector<double> carry;  // weights kept from an unresampled phi = 1 step
  std::vector<double> ll(N);
  std::vector<int> accepted(N);
  std::vector<SpectralField> pre(N);
  std::vector<SpectralField> post(N);

  for (int n = 1; n <= T; ++n) {
    parallel_for(N, config.workers, [&](std::size_t j) { likelihood.extend(ens.particles[j]); });

    double phi = 0.0;
    int r = 0;
    bool kept = false;
    while (phi < 1.0) {
      ++r;
      for (std::size_t j = 0; j < N; ++j) ll[j] = ens.particles[j].log_liks[n - 1];
      double phi_next = 1.0;
      if (config.tempering == Tempering::kAdaptive)
        phi_next = next_temperature(ll, phi, config.N_thresh, tol, config.bisection_max_iter, carry).phi;
      if (!(phi_next > phi)) throw std::logic_error("temperature ladder failed to increase");
      std::vector<double> w = reweight(ll, phi, phi_next, carry);
      carry.clear();

      TemperRow row;
      row.n = n;
      row.r = r;
      row.phi = phi_next;
      row.ess = ess(w);

      WindowMoments moments;
      if (config.kernel == KernelKind::kWindowed)
        moments = window_moments(ens.particles, w, window, prior, config.cov_eps);

      const bool skip = config.resample_at_phi1 == ResamplePolicy::kAdaptive && phi_next >= 1.0 &&
                        row.ess > config.N_thresh;
      if (skip) {
        ens.weights = std::move(w);
      } else {
        const auto parents = config.resampling == ResampleScheme::kSystematic ? resample_systematic(w, coordinator)
                                                                              : resample_multinomial(w, coordinator);
        std::vector<ChainState> next(N);
        for (std::size_t j = 0; j < N; ++j) next[j] = ens.particles[parents[j]];
        ens.particles = std::move(next);
        ens.weights.assign(N, 1.0 / static_cast<double>(N));
      }
      row.resampled = !skip;
      kept = skip;

      for (std::size_t j = 0; j < N; ++j) pre[j] = ens.particles[j].field;
      KernelParams params;
      params.kind = config.kernel;
      params.rho = config.rho;
      params.rho_L = config.rho_L;
      params.rho_H = config.rho_H;
      params.moments = &moments;
      const TemperedTarget target{&likelihood, &prior, n, phi_next};
      parallel_for(N, config.workers, [&](std::size_t j) {
        RngStream rng(config.seed, StreamTag::kMutation,
                      {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r), j});
        accepted[j] = mutate(ens.particles[j], config.M, params, target, rng);
      });
      for (std::size_t j = 0; j < N; ++j) post[j] = ens.particles[j].field;

      if (config.M > 0) {
        double sum = 0.0;
        row.acc_min = 1.0;
        row.acc_max = 0.0;
        for (const int a : accepted) {
          const double rate = static_cast<double>(a) / config.M;
          sum += rate;
          row.acc_min = std::min(row.acc_min, rate);
          row.acc_max = std::max(row.acc_max, rate);
        }
        row.acc_mean = sum / static_cast<double>(N);
      } else {
        row.acc_mean = row.acc_min = row.acc_max = std::numeric_limits<double>::quiet_NaN();
      }
      row.jitter = jitter_statistic(pre, post, tracked, ens.weights);
      row.evolve_calls = likelihood.evolve_calls() - calls0;
      row.wall_ms = elapsed_ms(start);
      ens.n = n;
      ens.r = r;
      if (hooks.on_row) hooks.on_row(row);
      result.log.push_back(std::move(row));
      phi = phi_next;
    }
    if (kept) carry = ens.weights;
    if (hooks.on_stage) hooks.on_stage(n, ens);
  }
  result.evolve_calls = likelihood.evolve_calls() - calls0;
  return result;
}

}  // namespace nsesmc
