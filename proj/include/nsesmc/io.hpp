#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nsesmc/diag.hpp"
#include "nsesmc/obs.hpp"
#include "nsesmc/smc.hpp"
#include "nsesmc/spectral.hpp"

namespace nsesmc {

/// Shortest round-trip decimal; "nan", "inf" and "-inf" for non-finite values.
std::string format_double(double x);
/// Inverse of format_double. Throws std::invalid_argument on malformed text.
double parse_double(std::string_view s);

/// Field records: header "k1,k2,re,im", then one line per stored mode in lattice order.
void write_field_csv(const std::filesystem::path& path, const SpectralField& field);
/// Every lattice mode must appear exactly once; order is free.
SpectralField read_field_csv(const std::filesystem::path& path, LatticePtr lattice);

/// JSON document with positions, delta, horizon, gamma, records and provenance.
void write_dataset_json(const std::filesystem::path& path, const Dataset& dataset);
Dataset read_dataset_json(const std::filesystem::path& path);

std::string temper_csv_header(std::span<const Mode> tracked);
std::string temper_csv_line(const TemperRow& row);
void write_temper_csv(const std::filesystem::path& path, std::span<const TemperRow> rows,
                      std::span<const Mode> tracked);
/// Rows mapped back from a temper CSV (jitter columns included).
std::vector<TemperRow> read_temper_csv(const std::filesystem::path& path);

/// Ensemble snapshot: particle_<j>.csv per particle plus weights.csv.
void write_snapshot(const std::filesystem::path& dir, std::span<const ChainState> particles,
                    std::span<const double> weights);
struct Snapshot {
  std::vector<SpectralField> fields;
  std::vector<double> weights;
};
Snapshot read_snapshot(const std::filesystem::path& dir, LatticePtr lattice);

/// Columns k1,k2,mean_re,mean_im,std_re,std_im,ratio_re,ratio_im.
void write_summary_csv(const std::filesystem::path& path, const MarginalSummary& summary);
/// Dense grid, one row per k1 from -H to H, columns k2 from -H to H.
void write_heat_map_csv(const std::filesystem::path& path, std::span<const double> grid, int half_width);
void write_scalar_grid_csv(const std::filesystem::path& path, const ScalarGrid& grid);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace nsesmc
