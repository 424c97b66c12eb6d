#pragma once

// Worst-case fidelity over two-qubit states with one score constraint:
//
//   minimize   tr(M rho)
//   subject to tr(B rho) >= beta',  rho >= 0,  tr(rho) = 1
//
// The Lagrange dual has a single scalar multiplier mu >= 0,
//   g(mu) = mu beta' + lambda_min(M - mu B),
// which is concave. Its maximizer is located by bisection on the
// supergradient beta' - <v|B|v> over the bottom eigenspace of M - mu B, and a
// primal state of rank <= 2 is assembled from the two bracketing eigenvectors.

#include <optional>

#include "gchsh/linalg.hpp"
#include "gchsh/maps.hpp"

namespace gchsh::sdp {

using linalg::DensityMatrix;
using linalg::Herm4;

struct SdpInstance {
  Herm4 objective;      // M = (Lambda_A (x) Lambda_B)^dagger [phi+]
  Herm4 constraint_op;  // B_theta(a, b)
  double threshold;     // beta'
};

enum class SdpStatus { optimal, infeasible };

struct SdpResult {
  SdpStatus status = SdpStatus::infeasible;
  double primal_value = 0.0;
  double dual_value = 0.0;
  std::optional<DensityMatrix> witness_state;
  /// Maximizing mu. Infinite when the threshold equals lambda_max(B): the
  /// supremum of g is then approached but not attained.
  double dual_multiplier = 0.0;
};

/// Adjoint of the product channel applied to |phi+><phi+|; 0 <= M <= 1.
Herm4 pullback_objective(const maps::QubitChannel& alice, const maps::QubitChannel& bob);

/// Validated instance. Throws InputError when the objective's spectrum leaves [0, 1] by more than 1e-10.
SdpInstance make_instance(const Herm4& objective, const Herm4& constraint_op, double threshold);

/// threshold <= lambda_max(constraint_op) + kTol.feasibility.
bool feasible(const SdpInstance& instance);

/// Dual function mu beta' + lambda_min(M - mu B).
double dual_function(const SdpInstance& instance, double mu);

SdpResult solve(const SdpInstance& instance);

}  // namespace gchsh::sdp
