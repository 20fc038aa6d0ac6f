#include <cmath>

#include "doctest.h"
#include "nsesmc/diag.hpp"

using namespace nsesmc;

TEST_SUITE("diag") {
  TEST_CASE("standardization") {
    const auto lat = make_lattice(3);
    const PriorSpec prior = PriorSpec::from_beta2(5.0, 2.2, lat);
    for (const Complex x : standardize(SpectralField(lat), prior)) CHECK(x == Complex{});
    RngStream rng(1, StreamTag::kTest, {600});
    const SpectralField f = sample_prior(prior, rng);
    const auto xi = standardize(f, prior);
    const SpectralField back = unstandardize(xi, prior);
    for (std::size_t i = 0; i < f.size(); ++i) {
      CHECK(std::abs(back[i] - f[i]) < 1e-13 * std::max(1.0, std::abs(f[i])));
      const Mode k = (*lat)[i];
      CHECK(std::abs(xi[i] - f[i] * std::sqrt(2.0 / 5.0) * std::pow(k.norm(), 2.2)) < 1e-12 * std::abs(xi[i]));
    }
    const int n = 100000;
    std::vector<double> s2(lat->size());
    for (int t = 0; t < n; ++t) {
      const auto z = standardize(sample_prior(prior, rng), prior);
      for (std::size_t i = 0; i < z.size(); ++i) s2[i] += (std::norm(z[i]) / 2.0) / n;
    }
    for (const double v : s2) CHECK(std::abs(v - 1.0) < 0.03);
  }

  TEST_CASE("marginal summaries") {
    const auto lat = make_lattice(2);
    const PriorSpec prior = PriorSpec::from_beta2(5.0, 2.2, lat);
    RngStream rng(2);
    std::vector<SpectralField> fields;
    for (int j = 0; j < 4000; ++j) fields.push_back(sample_prior(prior, rng));
    const std::vector<double> uniform(fields.size(), 1.0 / fields.size());
    const MarginalSummary s = summarize_fields(fields, uniform, prior);
    REQUIRE(s.rows.size() == lat->size());
    for (const MarginalRow& row : s.rows) {
      CHECK(std::abs(row.ratio_re - 1.0) < 0.06);
      CHECK(std::abs(row.ratio_im - 1.0) < 0.06);
      CHECK(std::abs(row.mean_re) < 0.08);
      CHECK_FALSE(row.flagged);
      CHECK(row.ratio_re == row.std_re);
    }
    CHECK(s.flagged_modes().empty());

    const MarginalSummary one = summarize_fields(std::span(fields).first(1), std::vector<double>{1.0}, prior);
    for (const MarginalRow& row : one.rows) {
      CHECK(row.std_re == 0.0);
      CHECK(row.ratio_combined == 0.0);
      CHECK(row.flagged);
    }
    CHECK(one.flagged_modes().size() == lat->size());
    CHECK(one.flagged_modes_re().size() == lat->size());

    std::vector<double> hot(fields.size(), 0.0);
    hot[17] = 1.0;
    const MarginalSummary h = summarize_fields(fields, hot, prior);
    const auto xi = standardize(fields[17], prior);
    for (std::size_t i = 0; i < lat->size(); ++i) {
      CHECK(h.rows[i].mean_re == doctest::Approx(xi[i].real()).epsilon(1e-12));
      CHECK(h.rows[i].mean_im == doctest::Approx(xi[i].imag()).epsilon(1e-12));
      CHECK(h.rows[i].std_im == doctest::Approx(0.0));
    }
    CHECK(h.find({1, 1}) != nullptr);
    CHECK(h.find({-1, -1}) == nullptr);

    // Recomputed from raw standardized values.
    std::vector<double> w(fields.size());
    for (double& x : w) x = rng.uniform();
    double z = 0.0;
    for (const double x : w) z += x;
    for (double& x : w) x /= z;
    const MarginalSummary ws = summarize_fields(fields, w, prior);
    const std::size_t i = *lat->index_of({2, 1});
    double m = 0.0, q = 0.0;
    for (std::size_t j = 0; j < fields.size(); ++j) m += w[j] * standardize(fields[j], prior)[i].real();
    for (std::size_t j = 0; j < fields.size(); ++j)
      q += w[j] * std::pow(standardize(fields[j], prior)[i].real() - m, 2);
    CHECK(std::abs(ws.rows[i].ratio_re - std::sqrt(q)) < 1e-12);

    std::vector<ChainState> states;
    for (const auto& f : std::span(fields).first(10)) states.push_back(ChainState::at_origin(f));
    const MarginalSummary e = summarize_ensemble(states, std::vector<double>(10, 0.1), prior);
    const MarginalSummary e2 = summarize_fields(std::span(fields).first(10), std::vector<double>(10, 0.1), prior);
    CHECK(e.rows[3].std_re == e2.rows[3].std_re);
  }

  TEST_CASE("heat map layout") {
    const auto lat = make_lattice(2);
    const PriorSpec prior = PriorSpec::from_beta2(5.0, 2.2, lat);
    RngStream rng(3);
    std::vector<SpectralField> fields;
    for (int j = 0; j < 50; ++j) fields.push_back(sample_prior(prior, rng));
    const MarginalSummary s = summarize_fields(fields, std::vector<double>(50, 0.02), prior);
    const auto grid = ratio_heat_map(s, 2);
    REQUIRE(grid.size() == 25);
    const auto at = [&](int k1, int k2) { return grid[(k1 + 2) * 5 + (k2 + 2)]; };
    CHECK(std::isnan(at(0, 0)));
    CHECK(at(1, 2) == s.find({1, 2})->ratio_combined);
    CHECK(at(-1, -2) == at(1, 2));
    CHECK(at(2, -1) == s.find({2, -1})->ratio_combined);
    const auto big = ratio_heat_map(s, 3);
    CHECK(std::isnan(big[(3 + 3) * 7 + (3 + 3)]));
  }

  TEST_CASE("autocorrelation") {
    RngStream rng(4);
    std::vector<double> white(100000);
    for (double& x : white) x = rng.normal();
    const auto a = autocorrelation(white, 20);
    CHECK(a[0] == doctest::Approx(1.0).epsilon(1e-14));
    for (int l = 1; l <= 20; ++l) CHECK(std::abs(a[l]) < 0.02);
    const double c = 0.8;
    std::vector<double> ar(100000);
    ar[0] = rng.normal();
    for (std::size_t t = 1; t < ar.size(); ++t) ar[t] = c * ar[t - 1] + std::sqrt(1 - c * c) * rng.normal();
    const auto b = autocorrelation(ar, 10);
    for (int l = 0; l <= 10; ++l) CHECK(std::abs(b[l] - std::pow(c, l)) < 0.02);
    const auto k = autocorrelation(std::vector<double>(10, 3.0), 3);
    CHECK(k[0] == 1.0);
    CHECK(std::isnan(k[1]));
    CHECK_THROWS(autocorrelation(std::vector<double>(3, 1.0), 3));
  }

  TEST_CASE("batch means") {
    RngStream rng(5);
    std::vector<double> x(20000);
    for (double& v : x) v = 2.0 + rng.normal();
    const double se = batch_means_se(x, 20);
    CHECK(se > 0.5 / std::sqrt(20000.0));
    CHECK(se < 2.0 / std::sqrt(20000.0));
    CHECK_THROWS(batch_means_se(x, 1));
  }
}
