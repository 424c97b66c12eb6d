#pragma once

// Score sweeps, the convex roof from the Tsirelson point and the resulting
// piecewise-linear fidelity bound.

#include <cstdint>
#include <functional>
#include <vector>

#include "gchsh/bell.hpp"
#include "gchsh/maps.hpp"
#include "gchsh/optimizer.hpp"

namespace gchsh::bounds {

using bell::Theta;

/// (1 - F) / (2 sqrt2 - score). Throws DomainError when score >= 2 sqrt2.
double slope(double score, double fidelity);

/// Sweep step (theta / (pi/4))^2 kappa.
double score_step(Theta theta, double kappa);

/// Throws InputError when theta is outside [pi/64, pi/4].
void check_supported(Theta theta);

struct SweepConfig {
  double kappa = 0.025;
  int confirm_steps = 2;  // steps past the inflection that must keep lowering the slope
  int max_steps = 400;
  optim::AngleSearchConfig search{};
  maps::AliceSearchOptions alice{};
};

struct SweepPoint {
  double score;
  double min_fidelity;
  friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

struct ScoreSweep {
  Theta theta{kPi / 4.0};
  double kappa = 0.025;
  std::vector<SweepPoint> points;  // scores strictly decreasing from the local bound
  std::size_t inflection = 0;      // index of the largest slope
  bool inflection_found = false;
};

/// Called after each sweep step with the step index and the recorded point.
using SweepProgress = std::function<void(int, const SweepPoint&)>;

/// Runs certified_min at beta_L - k step for k = 0, 1, ... and stops once the
/// slope has decreased for 1 + confirm_steps steps past its maximum. A slope
/// that rises again after the first decrease is logged and the sweep goes on.
ScoreSweep sweep_scores(const maps::AliceParamTable& alice, const SweepConfig& config,
                        const SweepProgress& progress = {});
ScoreSweep sweep_scores(Theta theta, const SweepConfig& config, const SweepProgress& progress = {});

struct BoundCurve {
  Theta theta{kPi / 4.0};
  double beta_local = 0.0;
  double beta_star = 0.0;
  double fidelity_star = 0.0;
  double slope_star = 0.0;
  double beta_trivial = 0.0;
  double kappa = 0.025;
  std::uint64_t seed = 0;
  int restarts = 0;
  std::vector<SweepPoint> sweep;
};

/// beta_t = (1/2 - m*) / alpha* + beta* at the inflection of the sweep.
/// Throws SweepIncompleteError when the sweep found no inflection.
BoundCurve trivial_score(const ScoreSweep& sweep);

/// 1/2 up to beta_trivial, then linear up to 1 at 2 sqrt2.
/// Throws DomainError when beta > 2 sqrt2 (scores within 1e-12 above are clamped).
double bound_at(const BoundCurve& curve, double beta);

/// Line through (2 sqrt2, 1) with slope slope_star, without the 1/2 floor.
double roof_line(const BoundCurve& curve, double beta);

/// Sweep plus trivial_score. Checks that theta is in the supported range.
BoundCurve compute_curve(const maps::AliceParamTable& alice, const SweepConfig& config,
                         const SweepProgress& progress = {});
BoundCurve compute_curve(Theta theta, const SweepConfig& config, const SweepProgress& progress = {});

}  // namespace gchsh::bounds
