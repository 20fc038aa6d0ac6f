#include <algorithm>
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "nsesmc/io.hpp"

using namespace nsesmc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nsesmc_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("number formatting round-trips") {
    RngStream rng(1);
    for (int i = 0; i < 1000; ++i) {
      const double x = rng.normal() * std::pow(10.0, static_cast<int>(rng.uniform() * 40) - 20);
      CHECK(parse_double(format_double(x)) == x);
    }
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(std::isnan(parse_double("nan")));
    CHECK(parse_double("inf") == std::numeric_limits<double>::infinity());
    CHECK_THROWS(parse_double("1.5x"));
    CHECK_THROWS(parse_double(""));
  }

  TEST_CASE("field files") {
    const fs::path dir = scratch("field");
    const auto lat = make_lattice(3);
    RngStream rng(2);
    const SpectralField f = sample_prior(PriorSpec::from_beta2(5.0, 2.2, lat), rng);
    write_field_csv(dir / "f.csv", f);
    const std::string text = read_text(dir / "f.csv");
    CHECK(text.rfind("k1,k2,re,im\n", 0) == 0);
    const SpectralField g = read_field_csv(dir / "f.csv", lat);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(g[i] == f[i]);
    CHECK_THROWS(read_field_csv(dir / "f.csv", make_lattice(4)));
    write_text(dir / "dup.csv", text + "1,0,0,0\n");
    CHECK_THROWS(read_field_csv(dir / "dup.csv", lat));
    CHECK_THROWS(read_field_csv(dir / "missing.csv", lat));
  }

  TEST_CASE("dataset files") {
    const fs::path dir = scratch("dataset");
    Dataset d;
    d.positions = regular_grid_positions(4);
    d.delta = 0.02;
    d.horizon = 2;
    d.gamma = std::sqrt(0.2);
    for (int i = 0; i < 8; ++i) d.records.push_back({0.1 * i, -0.3 * i + 1e-17});
    d.provenance = {42, 0.02, 1e-3, 10, 2, "grad-perp-cos"};
    write_dataset_json(dir / "d.json", d);
    const Dataset r = read_dataset_json(dir / "d.json");
    CHECK(r.positions == d.positions);
    CHECK(r.records == d.records);
    CHECK(r.gamma == d.gamma);
    CHECK(r.delta == d.delta);
    CHECK(r.horizon == 2);
    CHECK(r.provenance.seed == 42);
    CHECK(r.provenance.half_width == 10);
    CHECK(r.provenance.forcing == "grad-perp-cos");
    write_text(dir / "bad.json", "{\"format\": \"other\"}");
    CHECK_THROWS_AS(read_dataset_json(dir / "bad.json"), std::invalid_argument);
    write_text(dir / "broken.json", "{not json");
    CHECK_THROWS_AS(read_dataset_json(dir / "broken.json"), std::invalid_argument);
  }

  TEST_CASE("temper log") {
    const fs::path dir = scratch("temper");
    const std::vector<Mode> tracked{{0, 1}, {-7, 7}};
    CHECK(temper_csv_header(tracked) ==
          "n,r,phi,ess,acc_mean,acc_min,acc_max,J_0_1,J_-7_7,evolve_calls,resampled\n");
    TemperRow a;
    a.n = 1;
    a.r = 2;
    a.phi = 0.125;
    a.ess = 340.5;
    a.acc_mean = 0.3;
    a.acc_min = 0.1;
    a.acc_max = 0.6;
    a.jitter = {0.25, std::nan("")};
    a.evolve_calls = 12345;
    a.resampled = false;
    a.wall_ms = 99.0;
    const std::vector<TemperRow> rows{a};
    write_temper_csv(dir / "t.csv", rows, tracked);
    const auto back = read_temper_csv(dir / "t.csv");
    REQUIRE(back.size() == 1);
    CHECK(back[0].phi == 0.125);
    CHECK(back[0].r == 2);
    CHECK(back[0].jitter[0] == 0.25);
    CHECK(std::isnan(back[0].jitter[1]));
    CHECK(back[0].evolve_calls == 12345);
    CHECK_FALSE(back[0].resampled);
    // Wall time is not part of the deterministic log.
    CHECK(read_text(dir / "t.csv").find("99") == std::string::npos);
  }

  TEST_CASE("snapshots") {
    const fs::path dir = scratch("snap");
    const auto lat = make_lattice(2);
    const PriorSpec prior = PriorSpec::from_beta2(5.0, 2.2, lat);
    RngStream rng(3);
    std::vector<ChainState> ps;
    for (int j = 0; j < 5; ++j) ps.push_back(ChainState::at_origin(sample_prior(prior, rng)));
    const std::vector<double> w{0.1, 0.2, 0.3, 0.15, 0.25};
    write_snapshot(dir / "s", ps, w);
    const Snapshot s = read_snapshot(dir / "s", lat);
    REQUIRE(s.fields.size() == 5);
    CHECK(s.weights == w);
    for (int j = 0; j < 5; ++j)
      for (std::size_t i = 0; i < lat->size(); ++i) CHECK(s.fields[j][i] == ps[j].field[i]);
    CHECK_THROWS(read_snapshot(dir / "nothing", lat));
  }

  TEST_CASE("summary and grid exports") {
    const fs::path dir = scratch("summary");
    const auto lat = make_lattice(1);
    const PriorSpec prior = PriorSpec::from_beta2(5.0, 2.2, lat);
    RngStream rng(4);
    std::vector<SpectralField> f{sample_prior(prior, rng), sample_prior(prior, rng)};
    const MarginalSummary s = summarize_fields(f, std::vector<double>{0.5, 0.5}, prior);
    write_summary_csv(dir / "s.csv", s);
    const std::string text = read_text(dir / "s.csv");
    CHECK(text.rfind("k1,k2,mean_re,mean_im,std_re,std_im,ratio_re,ratio_im\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
    write_heat_map_csv(dir / "h.csv", ratio_heat_map(s, 1), 1);
    const std::string h = read_text(dir / "h.csv");
    CHECK(std::count(h.begin(), h.end(), '\n') == 3);
    CHECK(h.find("nan") != std::string::npos);
    write_scalar_grid_csv(dir / "g.csv", vorticity(f[0], 4));
    const std::string g = read_text(dir / "g.csv");
    CHECK(std::count(g.begin(), g.end(), '\n') >= 4);
  }
}
