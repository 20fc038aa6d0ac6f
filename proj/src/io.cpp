#include "nsesmc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace nsesmc {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("malformed number '" + std::string(s) + "'");
  return x;
}

namespace {

int parse_int(std::string_view s) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("malformed integer '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = line.find(sep, start);
    out.push_back(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().remove_suffix(1);
  return out;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) lines.push_back(std::move(l));
  return lines;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string mode_label(Mode k) { return "J_" + std::to_string(k.k1) + "_" + std::to_string(k.k2); }

}  // namespace

void write_text(const fs::path& path, std::string_view text) {
  auto out = open_out(path);
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_field_csv(const fs::path& path, const SpectralField& field) {
  std::string s = "k1,k2,re,im\n";
  const FreqLattice& lattice = field.lattice();
  for (std::size_t i = 0; i < field.size(); ++i) {
    s += std::to_string(lattice[i].k1) + "," + std::to_string(lattice[i].k2) + "," + format_double(field[i].real()) +
         "," + format_double(field[i].imag()) + "\n";
  }
  write_text(path, s);
}

SpectralField read_field_csv(const fs::path& path, LatticePtr lattice) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0].rfind("k1,k2,re,im", 0) != 0)
    throw std::invalid_argument(path.string() + ": missing field header");
  SpectralField f(lattice);
  std::vector<bool> seen(lattice->size(), false);
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto c = split(lines[l]);
    if (c.size() != 4) throw std::invalid_argument(path.string() + ": expected 4 columns");
    const Mode k{parse_int(c[0]), parse_int(c[1])};
    const auto i = lattice->index_of(k);
    if (!i) throw std::invalid_argument(path.string() + ": mode not in the lattice");
    if (seen[*i]) throw std::invalid_argument(path.string() + ": duplicate mode");
    seen[*i] = true;
    f[*i] = Complex(parse_double(c[2]), parse_double(c[3]));
  }
  for (const bool b : seen)
    if (!b) throw std::invalid_argument(path.string() + ": field does not cover the lattice");
  return f;
}

void write_dataset_json(const fs::path& path, const Dataset& d) {
  json j;
  j["format"] = "nsesmc-dataset/1";
  j["delta"] = d.delta;
  j["horizon"] = d.horizon;
  j["gamma"] = d.gamma;
  json pos = json::array();
  for (const Point& x : d.positions) pos.push_back({x[0], x[1]});
  j["positions"] = pos;
  json rec = json::array();
  for (int n = 1; n <= d.horizon; ++n) {
    json block = json::array();
    for (const Vec2& y : d.block(n)) block.push_back({y[0], y[1]});
    rec.push_back(block);
  }
  j["records"] = rec;
  j["provenance"] = {{"seed", d.provenance.seed},           {"nu", d.provenance.nu},
                     {"dt", d.provenance.dt},               {"half_width", d.provenance.half_width},
                     {"pad_factor", d.provenance.pad_factor}, {"forcing", d.provenance.forcing}};
  write_text(path, j.dump(1) + "\n");
}

Dataset read_dataset_json(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
    Dataset d;
    d.delta = j.at("delta").get<double>();
    d.horizon = j.at("horizon").get<int>();
    d.gamma = j.at("gamma").get<double>();
    for (const auto& p : j.at("positions")) d.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    const auto& rec = j.at("records");
    if (rec.size() != static_cast<std::size_t>(d.horizon)) throw std::invalid_argument("record block count");
    for (const auto& block : rec) {
      if (block.size() != d.positions.size()) throw std::invalid_argument("record block size");
      for (const auto& y : block) d.records.push_back({y.at(0).get<double>(), y.at(1).get<double>()});
    }
    const auto& pv = j.at("provenance");
    d.provenance.seed = pv.at("seed").get<std::uint64_t>();
    d.provenance.nu = pv.at("nu").get<double>();
    d.provenance.dt = pv.at("dt").get<double>();
    d.provenance.half_width = pv.at("half_width").get<int>();
    d.provenance.pad_factor = pv.at("pad_factor").get<int>();
    d.provenance.forcing = pv.at("forcing").get<std::string>();
    d.validate();
    return d;
  } catch (const json::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

std::string temper_csv_header(std::span<const Mode> tracked) {
  std::string s = "n,r,phi,ess,acc_mean,acc_min,acc_max";
  for (const Mode k : tracked) s += "," + mode_label(k);
  s += ",evolve_calls,resampled\n";
  return s;
}

std::string temper_csv_line(const TemperRow& row) {
  std::string s = std::to_string(row.n) + "," + std::to_string(row.r) + "," + format_double(row.phi) + "," +
                  format_double(row.ess) + "," + format_double(row.acc_mean) + "," + format_double(row.acc_min) +
                  "," + format_double(row.acc_max);
  for (const double j : row.jitter) s += "," + format_double(j);
  s += "," + std::to_string(row.evolve_calls) + "," + (row.resampled ? "1" : "0") + "\n";
  return s;
}

void write_temper_csv(const fs::path& path, std::span<const TemperRow> rows, std::span<const Mode> tracked) {
  std::string s = temper_csv_header(tracked);
  for (const auto& r : rows) s += temper_csv_line(r);
  write_text(path, s);
}

std::vector<TemperRow> read_temper_csv(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw std::invalid_argument(path.string() + ": empty temper log");
  const auto head = split(lines[0]);
  if (head.size() < 9 || head[0] != "n" || head[2] != "phi") throw std::invalid_argument(path.string() + ": bad header");
  const std::size_t jit = head.size() - 9;
  std::vector<TemperRow> rows;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto c = split(lines[l]);
    if (c.size() != head.size()) throw std::invalid_argument(path.string() + ": ragged row");
    TemperRow r;
    r.n = parse_int(c[0]);
    r.r = parse_int(c[1]);
    r.phi = parse_double(c[2]);
    r.ess = parse_double(c[3]);
    r.acc_mean = parse_double(c[4]);
    r.acc_min = parse_double(c[5]);
    r.acc_max = parse_double(c[6]);
    for (std::size_t t = 0; t < jit; ++t) r.jitter.push_back(parse_double(c[7 + t]));
    r.evolve_calls = static_cast<std::uint64_t>(parse_double(c[7 + jit]));
    r.resampled = c[8 + jit] == "1";
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_snapshot(const fs::path& dir, std::span<const ChainState> particles, std::span<const double> weights) {
  fs::create_directories(dir);
  std::string w = "particle,weight\n";
  for (std::size_t j = 0; j < particles.size(); ++j) {
    write_field_csv(dir / ("particle_" + std::to_string(j) + ".csv"), particles[j].field);
    w += std::to_string(j) + "," + format_double(weights[j]) + "\n";
  }
  write_text(dir / "weights.csv", w);
}

Snapshot read_snapshot(const fs::path& dir, LatticePtr lattice) {
  const auto lines = read_lines(dir / "weights.csv");
  Snapshot s;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto c = split(lines[l]);
    if (c.size() != 2) throw std::invalid_argument("weights.csv: expected 2 columns");
    s.fields.push_back(read_field_csv(dir / ("particle_" + std::string(c[0]) + ".csv"), lattice));
    s.weights.push_back(parse_double(c[1]));
  }
  return s;
}

void write_summary_csv(const fs::path& path, const MarginalSummary& summary) {
  std::string s = "k1,k2,mean_re,mean_im,std_re,std_im,ratio_re,ratio_im\n";
  for (const auto& r : summary.rows) {
    s += std::to_string(r.k.k1) + "," + std::to_string(r.k.k2) + "," + format_double(r.mean_re) + "," +
         format_double(r.mean_im) + "," + format_double(r.std_re) + "," + format_double(r.std_im) + "," +
         format_double(r.ratio_re) + "," + format_double(r.ratio_im) + "\n";
  }
  write_text(path, s);
}

void write_heat_map_csv(const fs::path& path, std::span<const double> grid, int half_width) {
  const std::size_t w = static_cast<std::size_t>(2 * half_width + 1);
  if (grid.size() != w * w) throw std::invalid_argument("heat map size mismatch");
  std::string s;
  for (std::size_t a = 0; a < w; ++a) {
    for (std::size_t b = 0; b < w; ++b) s += (b ? "," : "") + format_double(grid[a * w + b]);
    s += "\n";
  }
  write_text(path, s);
}

void write_scalar_grid_csv(const fs::path& path, const ScalarGrid& grid) {
  std::string s;
  for (int a = 0; a < grid.size; ++a) {
    for (int b = 0; b < grid.size; ++b)
      s += (b ? "," : "") + format_double(grid.values[static_cast<std::size_t>(a) * grid.size + b]);
    s += "\n";
  }
  write_text(path, s);
}

}  // namespace nsesmc
