#pragma once

// Choice of the generalized CHSH test that gives the highest fidelity bound
// for observed correlators, and (X, Y) mesh data.

#include <filesystem>
#include <string>
#include <vector>

#include "gchsh/bell.hpp"
#include "gchsh/bounds.hpp"

namespace gchsh::selector {

using bell::CorrelatorPair;
using bell::Theta;

struct NormalizedCorrelators {
  double x = 0.0;
  double y = 0.0;
  /// Applied relabelings in order: "negate_x", "negate_y", "swap_xy".
  std::vector<std::string> transform_log;
};

/// Outcome relabelings make X, Y >= 0, an input relabeling makes X >= Y.
NormalizedCorrelators normalize(const CorrelatorPair& c);

enum class RegionViolation { none, local, quantum };

/// X + Y >= 2 - 1e-12 and X^2 + Y^2 <= 4 + 1e-12.
bool in_region(const NormalizedCorrelators& n);
RegionViolation region_violation(const NormalizedCorrelators& n);

/// n uniform values over [lo, hi]; n = 1 gives {hi}.
struct ThetaGrid {
  double lo = kThetaSupportedMin;
  double hi = kThetaSupportedMax;
  int count = 500;

  std::vector<double> values() const;
  /// Throws InputError unless 1 <= count and the range lies inside [pi/64, pi/4].
  void validate() const;
};

struct SelectionResult {
  Theta theta_best{kPi / 4.0};
  double beta_at_best = 0.0;
  double fidelity_bound = 0.5;
  bool in_region = false;
  NormalizedCorrelators normalized;
};

/// Scans the grid from pi/4 downward and keeps the first theta whose bound
/// is not beaten by more than 1e-12. Throws RegionError outside the region
/// and TableIncompleteError when a grid theta has no curve.
SelectionResult select(const NormalizedCorrelators& n, const std::vector<bounds::BoundCurve>& table,
                       const ThetaGrid& grid = {});

struct MeshRecord {
  double x;
  double y;
  double fidelity_bound;
  double theta_best;
};

/// Points (i delta, j delta) of the normalized region X >= Y >= 0,
/// ordered by X then Y. Throws InputError for delta <= 0.
std::vector<MeshRecord> mesh(double delta, const std::vector<bounds::BoundCurve>& table, const ThetaGrid& grid = {});

/// CSV with header "X,Y,fidelity,theta", written through a temporary file.
/// Throws std::runtime_error when the path cannot be written.
void write_mesh_csv(const std::vector<MeshRecord>& records, const std::filesystem::path& path);

}  // namespace gchsh::selector
