#pragma once

// Generalized CHSH operators on a single two-qubit Jordan block.

#include <array>

#include "gchsh/linalg.hpp"

namespace gchsh::bell {

using linalg::Herm2;
using linalg::Herm4;

/// Weight of the generalized CHSH combination, in [0, pi/2].
class Theta {
 public:
  /// Throws InputError outside [0, pi/2]; angles are never wrapped.
  explicit Theta(double radians);
  double value() const { return v_; }
  friend bool operator==(Theta, Theta) = default;

 private:
  double v_;
};

/// Angle between the two local measurements of each party, both in [0, pi/2].
struct MeasurementAngles {
  double a;
  double b;
  /// Throws InputError when either angle is outside [0, pi/2].
  static MeasurementAngles make(double a, double b);
};

/// X = <A0 (B0 + B1)>, Y = <A1 (B0 - B1)>, each in [-2, 2].
struct CorrelatorPair {
  double x;
  double y;
  /// Throws RegionError when |x| or |y| exceeds 2.
  static CorrelatorPair make(double x, double y);
};

struct Observables {
  Herm2 a0, a1, b0, b1;
};

/// A_x = cos(a) sigma_h + (-1)^x sin(a) sigma_m,  B_y = cos(b) sigma_z + (-1)^y sin(b) sigma_x.
Observables observables(const MeasurementAngles& angles);

/// sqrt2 (cos(theta) A0 (B0 + B1) + sin(theta) A1 (B0 - B1)).
Herm4 bell_operator(Theta theta, const MeasurementAngles& angles);

/// CHSH coefficient matrix M(a, b) in the basis {sigma_h, sigma_m} x {sigma_z, sigma_x}:
/// B_{pi/4} = 2 sum_kl M_kl sigma_hat_k (x) sigma_bar_l.
std::array<std::array<double, 2>, 2> chsh_coefficient_matrix(const MeasurementAngles& angles);

/// 2 sqrt2 max(cos theta, sin theta).
double local_bound(Theta theta);

/// sqrt2 (cos(theta) X + sin(theta) Y).
double score_from_correlators(Theta theta, const CorrelatorPair& c);

struct FrameQuantities {
  double f;        // sqrt(1 + cos 2b cos 2theta)
  Herm2 sigma_plus;
  Herm2 sigma_minus;
};

/// Prefactor and Bloch-plane observables of the Bell operator on the a = 0
/// and a = pi/2 edges of the angle square. Throws InputError for b outside [0, pi/2].
FrameQuantities frame_quantities(Theta theta, double b);

}  // namespace gchsh::bell
