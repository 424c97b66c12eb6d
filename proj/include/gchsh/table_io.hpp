#pragma once

// Versioned JSON store for bound curves and Alice parameter grids.
// Numbers are written with 12 significant digits; writes go through a
// temporary file and a rename.

#include <filesystem>
#include <optional>
#include <vector>

#include "gchsh/bounds.hpp"
#include "gchsh/maps.hpp"

namespace gchsh::table {

inline constexpr int kFormatVersion = 1;

struct AliceGridRecord {
  bell::Theta theta{kPi / 4.0};
  std::vector<maps::AliceGridPoint> grid;
};

struct TableFile {
  std::vector<bounds::BoundCurve> curves;
  std::vector<AliceGridRecord> alice_params;
};

/// Value as it is stored: rounded to 12 significant digits.
double stored(double x);

void save_table(const TableFile& table, const std::filesystem::path& path);
void save_table(const std::vector<bounds::BoundCurve>& curves, const std::filesystem::path& path);

/// Throws TableError on unreadable, empty or corrupt files, schema version
/// mismatch, and curves with theta outside [pi/64, pi/4].
TableFile load_table_file(const std::filesystem::path& path);
std::vector<bounds::BoundCurve> load_table(const std::filesystem::path& path);

/// Curve or grid whose theta lies within `tol` of the requested one.
const bounds::BoundCurve* find_curve(const std::vector<bounds::BoundCurve>& curves, bell::Theta theta,
                                     double tol = 1e-9);
const AliceGridRecord* find_alice_grid(const TableFile& table, bell::Theta theta, double tol = 1e-9);

/// Inserts or replaces the record with matching theta, keeping curves sorted by theta.
void upsert(TableFile& table, const bounds::BoundCurve& curve);
void upsert(TableFile& table, const AliceGridRecord& record);

}  // namespace gchsh::table
