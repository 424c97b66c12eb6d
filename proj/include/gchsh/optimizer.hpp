#pragma once

// Outer minimization of the worst-case fidelity over measurement angles.

#include <cstdint>
#include <optional>
#include <vector>

#include "gchsh/bell.hpp"
#include "gchsh/maps.hpp"

namespace gchsh::optim {

using bell::MeasurementAngles;
using bell::Theta;

struct AngleSearchConfig {
  int restarts = 12;
  double local_tol = 1e-7;
  int max_iters = 400;
  std::uint64_t seed = 20210101;
  double initial_step = 0.1;
};

struct AngleMinimum {
  double score = 0.0;  // beta' the minimum was computed for
  MeasurementAngles angles{};
  double fidelity = 1.0;
  /// Best fidelity of every restart that reached a feasible point.
  std::vector<double> all_restart_values;
  int escalations = 0;
  /// True when the recorded value was taken from the previous (higher) score.
  bool envelope_applied = false;
};

/// 1 + (a - pi/4)^2 + (b - theta)^2; stands in for the objective where the
/// score threshold cannot be met.
double guidance_potential(Theta theta, const MeasurementAngles& angles);

/// Objective of the angle search: minimum fidelity of the state SDP, or the
/// guidance potential when no state reaches `score` at these angles.
struct AngleEvaluation {
  bool feasible;
  double value;
};
AngleEvaluation evaluate_angles(const maps::AliceParamTable& alice, double score, const MeasurementAngles& angles);

/// Minimum over (a, b) in [0, pi/2]^2 by multistart box-clamped Nelder-Mead.
/// Starts: (pi/4, theta), the four corners, then seeded uniform draws.
/// Throws DomainError for score > 2 sqrt2 and InfeasibleScoreError when no
/// restart reaches a feasible point.
AngleMinimum min_fidelity_over_angles(const maps::AliceParamTable& alice, double score,
                                      const AngleSearchConfig& config);
AngleMinimum min_fidelity_over_angles(Theta theta, double score, const AngleSearchConfig& config);

/// Minimum at `score` that respects monotonicity along a descending sweep:
/// when it exceeds `previous`, the search is rerun with doubled restarts (same
/// seed, so the start set grows) at most three times; a remaining violation
/// is resolved by recording the previous minimum and logging a warning.
/// Throws InputError when `score` is not below previous->score.
AngleMinimum certified_min(const maps::AliceParamTable& alice, double score, const std::optional<AngleMinimum>& previous,
                           const AngleSearchConfig& config);
AngleMinimum certified_min(Theta theta, double score, const std::optional<AngleMinimum>& previous,
                           const AngleSearchConfig& config);

}  // namespace gchsh::optim
