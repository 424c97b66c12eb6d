#pragma once

// Bound curves shared by several suites, computed once per process.

#include "gchsh/bounds.hpp"

namespace fixture {

inline const gchsh::maps::AliceParamTable& alice_table(double theta) {
  static const auto quarter = gchsh::maps::AliceParamTable::build(gchsh::bell::Theta(gchsh::kPi / 4));
  static const auto eighth = gchsh::maps::AliceParamTable::build(gchsh::bell::Theta(gchsh::kPi / 8));
  return theta > gchsh::kPi / 6 ? quarter : eighth;
}

inline const gchsh::bounds::BoundCurve& chsh_curve() {
  static const auto c = gchsh::bounds::compute_curve(alice_table(gchsh::kPi / 4), {});
  return c;
}

inline const gchsh::bounds::BoundCurve& eighth_curve() {
  static const auto c = gchsh::bounds::compute_curve(alice_table(gchsh::kPi / 8), {});
  return c;
}

/// The closed-form trivial score of the CHSH operator.
inline double chsh_trivial_score() { return 2 * (8 + 7 * gchsh::kSqrt2) / 17; }

}  // namespace fixture
