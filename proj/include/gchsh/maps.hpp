#pragma once

// Local extraction channels: dephasing maps whose strength follows the
// measurement angle, and the rotated/redirected variant used on Alice's side.

#include <vector>

#include "gchsh/bell.hpp"
#include "gchsh/linalg.hpp"

namespace gchsh::maps {

using bell::Theta;
using linalg::DensityMatrix;
using linalg::Mat2;

/// Completely positive trace-preserving qubit map in Kraus form.
class QubitChannel {
 public:
  /// Throws InputError when sum K^dagger K differs from the identity by more than kTol.kraus.
  explicit QubitChannel(std::vector<Mat2> kraus_ops);
  static QubitChannel identity();

  const std::vector<Mat2>& kraus_ops() const { return kraus_; }
  Mat2 apply(const Mat2& rho) const;
  /// Largest elementwise deviation of sum K^dagger K from the identity.
  double completeness_error() const;

 private:
  std::vector<Mat2> kraus_;
};

struct AliceMapParams {
  double omega = 0.0;  // rotation about sigma_y applied after dephasing
  double d = 0.0;      // dephasing direction Gamma(d) = cos(d) sigma_h - sin(d) sigma_m
  double g = 0.0;      // dephasing strength in [0, 1]
};

/// Fidelities and scores of the positive-eigenvalue frame states on Bob's
/// b = 0 (up) and b = pi/2 (down) edges after Alice's map.
struct FrameEvaluation {
  double f_up;
  double f_down;
  double s_up;    // 2 sqrt2 cos(theta)
  double s_down;  // 2 sqrt2 sin(theta)
};

/// (1 + sqrt2)(cos a + sin a - 1). Throws InputError for a outside [0, pi/2].
double strength_g(double a);

/// Reparameterization of b that sends 0, theta, pi/2 to 0, pi/4, pi/2.
/// The identity when theta = pi/4. Throws DomainError for theta in {0, pi/2}.
double continuation_angle(Theta theta, double b);

/// strength_g evaluated at continuation_angle(theta, b).
double strength_g_tilde(Theta theta, double b);

/// Dephasing with strength g_tilde along sigma_z for b <= theta, sigma_x otherwise.
QubitChannel bob_channel(Theta theta, double b);

/// Alice's map without rotation: d = 0 (sigma_h) for a <= pi/4, d = pi/2 (sigma_m) otherwise, no rotation.
AliceMapParams axis_dephasing_params(double a);

/// U(omega) [ (1+g)/2 rho + (1-g)/2 Gamma(d) rho Gamma(d) ] U(omega)^dagger.
QubitChannel alice_channel(Theta theta, double a, const AliceMapParams& params);

FrameEvaluation frame_fidelities(Theta theta, double a, double omega, double d);

/// max{(1 - F_up) / (2 sqrt2 - s_up), (1 - F_down) / (2 sqrt2 - s_down)}.
double alice_objective(Theta theta, double a, double omega, double d);

struct AliceSearchOptions {
  int grid_size = 100;
  int starts = 8;
  double tol = 1e-9;
  int max_iters = 2000;
};

/// Multistart minimization of alice_objective over (omega, d). The result is
/// never worse than axis_dephasing_params(a) or the unrotated (0, 0) map.
AliceMapParams optimize_alice_params(Theta theta, double a, const AliceSearchOptions& opt = {});

struct AliceGridPoint {
  double a;
  double omega;
  double d;
};

/// Precomputed optimal (omega, d) on a uniform grid of a over [0, pi/2].
/// Immutable once built; lookups from several threads are safe.
class AliceParamTable {
 public:
  static AliceParamTable build(Theta theta, const AliceSearchOptions& opt = {});
  /// Restores a persisted grid. Throws InputError on an empty or unsorted grid.
  static AliceParamTable from_grid(Theta theta, std::vector<AliceGridPoint> grid,
                                   const AliceSearchOptions& opt = {});

  Theta theta() const { return theta_; }
  const std::vector<AliceGridPoint>& grid() const { return grid_; }

  /// Grid value when `a` is a grid node; otherwise a local search warm-started
  /// from the nearest node.
  AliceMapParams params_at(double a) const;

 private:
  AliceParamTable(Theta theta, std::vector<AliceGridPoint> grid, const AliceSearchOptions& opt)
      : theta_(theta), grid_(std::move(grid)), opt_(opt) {}

  Theta theta_;
  std::vector<AliceGridPoint> grid_;
  AliceSearchOptions opt_;
};

/// (Lambda_A (x) Lambda_B)[rho].
DensityMatrix apply_product_channel(const QubitChannel& alice, const QubitChannel& bob, const DensityMatrix& rho);

}  // namespace gchsh::maps
