#include "nsesmc/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "nsesmc/io.hpp"
#include "nsesmc/obs.hpp"

namespace nsesmc::cli {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& s) {
  try {
    return parse_double(trim(s));
  } catch (const std::invalid_argument&) {
    throw ConfigError("expected a number, got '" + s + "'");
  }
}

template <class Int>
Int to_int(const std::string& raw) {
  const std::string s = trim(raw);
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ConfigError("expected an integer, got '" + s + "'");
  return v;
}

bool to_bool(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("expected a boolean, got '" + s + "'");
}

Mode to_mode(const std::string& s) {
  const auto parts = split_list(s, ',');
  if (parts.size() != 2) throw ConfigError("expected a mode 'k1,k2', got '" + s + "'");
  return {to_int<int>(parts[0]), to_int<int>(parts[1])};
}

std::string mode_text(Mode k) { return std::to_string(k.k1) + "," + std::to_string(k.k2); }

std::string modes_text(const std::vector<Mode>& ks) {
  std::string s;
  for (std::size_t i = 0; i < ks.size(); ++i) s += (i ? "; " : "") + mode_text(ks[i]);
  return s;
}

std::vector<Mode> to_modes(const std::string& s) {
  std::vector<Mode> out;
  for (const auto& item : split_list(s, ';')) out.push_back(to_mode(item));
  return out;
}

std::string points_text(const std::vector<Point>& ps) {
  std::string s;
  for (std::size_t i = 0; i < ps.size(); ++i)
    s += (i ? "; " : "") + format_double(ps[i][0]) + " " + format_double(ps[i][1]);
  return s;
}

std::vector<Point> to_points(const std::string& s) {
  std::vector<Point> out;
  for (const auto& item : split_list(s, ';')) {
    std::istringstream in(item);
    std::string a, b, extra;
    if (!(in >> a >> b) || (in >> extra)) throw ConfigError("expected a position 'x1 x2', got '" + item + "'");
    out.push_back({to_double(a), to_double(b)});
  }
  return out;
}

template <class E>
struct EnumName {
  E value;
  const char* name;
};

template <class E, std::size_t N>
E to_enum(const std::string& raw, const EnumName<E> (&names)[N]) {
  const std::string s = trim(raw);
  for (const auto& n : names)
    if (s == n.name) return n.value;
  std::string allowed;
  for (const auto& n : names) allowed += std::string(allowed.empty() ? "" : "|") + n.name;
  throw ConfigError("expected one of " + allowed + ", got '" + s + "'");
}

template <class E, std::size_t N>
std::string enum_text(E v, const EnumName<E> (&names)[N]) {
  for (const auto& n : names)
    if (n.value == v) return n.name;
  return "?";
}

constexpr EnumName<KernelKind> kKernels[] = {{KernelKind::kWindowed, "windowed"}, {KernelKind::kPcn, "pcn"}};
constexpr EnumName<Tempering> kTempering[] = {{Tempering::kAdaptive, "adaptive"}, {Tempering::kNone, "none"}};
constexpr EnumName<ResamplePolicy> kPolicies[] = {{ResamplePolicy::kAlways, "always"},
                                                  {ResamplePolicy::kAdaptive, "adaptive"}};
constexpr EnumName<ResampleScheme> kSchemes[] = {{ResampleScheme::kMultinomial, "multinomial"},
                                                 {ResampleScheme::kSystematic, "systematic"}};

struct Key {
  std::string section;
  std::string name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define NSESMC_DOUBLE(sec, key, member)                                                       \
  Key {                                                                                        \
    sec, key, [](ExperimentConfig& c, const std::string& v) { c.member = to_double(v); },      \
        [](const ExperimentConfig& c) { return format_double(c.member); }                      \
  }
#define NSESMC_INT(sec, key, member, type)                                                    \
  Key {                                                                                        \
    sec, key, [](ExperimentConfig& c, const std::string& v) { c.member = to_int<type>(v); },   \
        [](const ExperimentConfig& c) { return std::to_string(c.member); }                     \
  }
#define NSESMC_ENUM(sec, key, member, table)                                                  \
  Key {                                                                                        \
    sec, key, [](ExperimentConfig& c, const std::string& v) { c.member = to_enum(v, table); }, \
        [](const ExperimentConfig& c) { return enum_text(c.member, table); }                   \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      NSESMC_DOUBLE("prior", "beta2", prior.beta2),
      NSESMC_DOUBLE("prior", "alpha", prior.alpha),
      NSESMC_DOUBLE("solver", "nu", solver.nu),
      NSESMC_DOUBLE("solver", "dt", solver.dt),
      Key{"solver", "forcing", [](ExperimentConfig& c, const std::string& v) { c.solver.forcing = trim(v); },
          [](const ExperimentConfig& c) { return c.solver.forcing; }},
      Key{"solver", "forcing_wave", [](ExperimentConfig& c, const std::string& v) { c.solver.forcing_wave = to_mode(v); },
          [](const ExperimentConfig& c) { return mode_text(c.solver.forcing_wave); }},
      Key{"solver", "forcing_file", [](ExperimentConfig& c, const std::string& v) { c.solver.forcing_file = trim(v); },
          [](const ExperimentConfig& c) { return c.solver.forcing_file; }},
      NSESMC_INT("solver", "half_width", solver.half_width, int),
      NSESMC_INT("solver", "pad_factor", solver.pad_factor, int),
      NSESMC_DOUBLE("observation", "delta", observation.delta),
      NSESMC_INT("observation", "T", observation.T, int),
      NSESMC_INT("observation", "upsilon", observation.upsilon, int),
      Key{"observation", "positions",
          [](ExperimentConfig& c, const std::string& v) { c.observation.positions = to_points(v); },
          [](const ExperimentConfig& c) { return points_text(c.observation.positions); }},
      NSESMC_DOUBLE("observation", "gamma2", observation.gamma2),
      NSESMC_INT("smc", "N", smc.N, int),
      NSESMC_DOUBLE("smc", "N_thresh", smc.N_thresh),
      NSESMC_INT("smc", "M", smc.M, int),
      NSESMC_INT("smc", "K", smc.K, int),
      NSESMC_DOUBLE("smc", "rho_L", smc.rho_L),
      NSESMC_DOUBLE("smc", "rho_H", smc.rho_H),
      NSESMC_ENUM("smc", "kernel", smc.kernel, kKernels),
      NSESMC_DOUBLE("smc", "rho", smc.rho),
      NSESMC_ENUM("smc", "tempering", smc.tempering, kTempering),
      NSESMC_ENUM("smc", "resample_at_phi1", smc.resample_at_phi1, kPolicies),
      NSESMC_ENUM("smc", "resampling", smc.resampling, kSchemes),
      NSESMC_DOUBLE("smc", "bisection_tol", smc.bisection_tol),
      NSESMC_INT("smc", "bisection_max_iter", smc.bisection_max_iter, int),
      NSESMC_DOUBLE("smc", "cov_eps", smc.cov_eps),
      Key{"smc", "tracked", [](ExperimentConfig& c, const std::string& v) { c.smc.tracked = to_modes(v); },
          [](const ExperimentConfig& c) { return modes_text(c.smc.tracked); }},
      Key{"smc", "snapshots", [](ExperimentConfig& c, const std::string& v) { c.snapshots = to_bool(v); },
          [](const ExperimentConfig& c) { return std::string(c.snapshots ? "true" : "false"); }},
      NSESMC_DOUBLE("mcmc", "rho", mcmc.rho),
      NSESMC_INT("mcmc", "iterations", mcmc.iterations, long),
      NSESMC_INT("mcmc", "thin", mcmc.thin, long),
      NSESMC_INT("mcmc", "burn_in", mcmc.burn_in, long),
      NSESMC_INT("mcmc", "record_half_width", mcmc.record_half_width, int),
      NSESMC_INT("mcmc", "max_lag", mcmc.max_lag, int),
      NSESMC_INT("run", "seed", seed, std::uint64_t),
      Key{"run", "output", [](ExperimentConfig& c, const std::string& v) { c.output = trim(v); },
          [](const ExperimentConfig& c) { return c.output; }},
  };
  return k;
}

#undef NSESMC_DOUBLE
#undef NSESMC_INT
#undef NSESMC_ENUM

const Key& find_key(const std::string& section, const std::string& name) {
  for (const auto& k : keys())
    if (k.section == section && k.name == name) return k;
  throw ConfigError("unknown config key '" + section + "." + name + "'");
}

struct Tracker {
  bool n_thresh_set = false;
};

void apply(ExperimentConfig& c, Tracker& t, const std::string& section, const std::string& name,
           const std::string& value) {
  const Key& k = find_key(section, name);
  try {
    k.set(c, value);
  } catch (const ConfigError& e) {
    throw ConfigError(section + "." + name + ": " + e.what());
  }
  if (section == "smc" && name == "N_thresh") t.n_thresh_set = true;
}

void apply_overrides(ExperimentConfig& c, Tracker& t, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("override '" + o + "' is not of the form section.key=value");
    apply(c, t, trim(o.substr(0, dot)), trim(o.substr(dot + 1, eq - dot - 1)), o.substr(eq + 1));
  }
}

ExperimentConfig parse_stream(std::istream& in, const std::vector<std::string>& overrides) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig c;
  Tracker t;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError("config key '" + section + "' outside a section");
    for (const auto& [name, value] : body) apply(c, t, section, name, value.data());
  }
  apply_overrides(c, t, overrides);
  if (!t.n_thresh_set) c.smc.N_thresh = c.smc.N / 3.0;
  c.validate();
  return c;
}

}  // namespace

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (!(prior.beta2 > 0.0)) fail("prior.beta2 must be > 0");
  if (!(prior.alpha > 1.0)) fail("prior.alpha must be > 1 (trace-class prior covariance)");
  if (!(solver.nu > 0.0)) fail("solver.nu must be > 0");
  if (!(solver.dt > 0.0)) fail("solver.dt must be > 0");
  if (solver.half_width < 1) fail("solver.half_width must be >= 1");
  if (solver.pad_factor < 2) fail("solver.pad_factor must be >= 2");
  if (solver.forcing != "grad-perp-cos" && solver.forcing != "file" && solver.forcing != "none")
    fail("solver.forcing must be grad-perp-cos, file or none");
  if (solver.forcing == "file" && solver.forcing_file.empty()) fail("solver.forcing_file is required for forcing=file");
  if (!(observation.delta > 0.0)) fail("observation.delta must be > 0");
  try {
    (void)steps_for(observation.delta, solver.dt);
  } catch (const std::invalid_argument&) {
    fail("solver.dt must divide observation.delta");
  }
  if (observation.T < 0) fail("observation.T must be >= 0");
  if (!(observation.gamma2 >= 0.0)) fail("observation.gamma2 must be >= 0");
  if (observation.positions.empty()) {
    const int s = static_cast<int>(std::lround(std::sqrt(static_cast<double>(std::max(observation.upsilon, 0)))));
    if (observation.upsilon < 1 || s * s != observation.upsilon)
      fail("observation.upsilon must be a positive perfect square when no positions are given");
  } else {
    for (const Point& x : observation.positions)
      if (!(x[0] >= 0.0 && x[0] < kTwoPi && x[1] >= 0.0 && x[1] < kTwoPi))
        fail("observation.positions must lie in [0, 2pi)^2");
  }
  try {
    smc.validate();
  } catch (const std::invalid_argument& e) {
    fail(std::string("smc: ") + e.what());
  }
  for (const Mode k : smc.tracked)
    if (k == Mode{0, 0}) fail("smc.tracked may not contain 0,0");
  if (!(mcmc.rho >= 0.0 && mcmc.rho <= 1.0)) fail("mcmc.rho must lie in [0, 1]");
  if (mcmc.iterations < 0) fail("mcmc.iterations must be >= 0");
  if (mcmc.thin < 1) fail("mcmc.thin must be >= 1");
  if (mcmc.burn_in < 0) fail("mcmc.burn_in must be >= 0");
  if (mcmc.record_half_width < 1) fail("mcmc.record_half_width must be >= 1");
  if (mcmc.max_lag < 0) fail("mcmc.max_lag must be >= 0");
}

LatticePtr ExperimentConfig::lattice() const { return make_lattice(solver.half_width); }

PriorSpec ExperimentConfig::prior_spec(LatticePtr lattice) const {
  return PriorSpec::from_beta2(prior.beta2, prior.alpha, std::move(lattice));
}

SolverSpec ExperimentConfig::solver_spec(LatticePtr lattice, const std::filesystem::path& base_dir) const {
  SolverSpec s;
  s.nu = solver.nu;
  s.dt = solver.dt;
  s.pad_factor = solver.pad_factor;
  if (solver.forcing == "grad-perp-cos") {
    s.forcing = grad_perp_cos_forcing(lattice, solver.forcing_wave);
  } else if (solver.forcing == "file") {
    std::filesystem::path p = solver.forcing_file;
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    try {
      s.forcing = read_field_csv(p, lattice);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("solver.forcing_file: ") + e.what());
    }
  } else {
    s.forcing = SpectralField(lattice);
  }
  return s;
}

std::vector<Point> ExperimentConfig::positions() const {
  if (!observation.positions.empty()) return observation.positions;
  return regular_grid_positions(observation.upsilon);
}

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  std::istringstream in(text);
  return parse_stream(in, overrides);
}

ExperimentConfig load_config(const std::optional<std::filesystem::path>& path,
                             const std::vector<std::string>& overrides) {
  if (!path) return parse_config("", overrides);
  std::ifstream in(*path);
  if (!in) throw ConfigError("cannot open config " + path->string());
  return parse_stream(in, overrides);
}

std::string render_config(const ExperimentConfig& config) {
  std::string out;
  std::string section;
  for (const auto& k : keys()) {
    if (k.section != section) {
      out += (section.empty() ? "" : "\n") + std::string("[") + k.section + "]\n";
      section = k.section;
    }
    out += k.name + " = " + k.get(config) + "\n";
  }
  return out;
}

}  // namespace nsesmc::cli
