#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace gchsh {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrt2 = std::numbers::sqrt2;
/// Tsirelson bound of every generalized CHSH operator.
inline constexpr double kQuantumBound = 2.0 * std::numbers::sqrt2;

/// Range of theta for which bound curves are computed. Below the lower end the
/// strength continuation for Bob's map becomes numerically singular.
inline constexpr double kThetaSupportedMin = std::numbers::pi / 64.0;
inline constexpr double kThetaSupportedMax = std::numbers::pi / 4.0;

/// Numerical tolerances shared by every module.
struct Tolerances {
  double hermitian = 1e-12;        // elementwise |M - M^dagger|
  double trace = 1e-10;            // |tr(rho) - 1|
  double psd = 1e-10;              // smallest admissible eigenvalue is -psd
  double unit_norm = 1e-12;        // |<psi|psi> - 1|
  double reconstruction = 1e-10;   // ||M - V L V^dagger||_max
  double degenerate_gap = 1e-9;    // eigenvalue clustering
  double fidelity_clamp = 1e-12;
  double kraus = 1e-12;            // ||sum K^dagger K - 1||_max
  double feasibility = 1e-10;      // threshold <= lambda_max(B) + feasibility
  double constraint = 1e-8;        // witness score violation
  double duality_gap = 1e-7;
};

inline constexpr Tolerances kTol{};

/// Malformed argument: unknown name, wrong dimension, out-of-domain angle.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain where a formula is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// No measurement angles can reach the requested score.
class InfeasibleScoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The score sweep ended before a point of inflection was located.
class SweepIncompleteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Corrupt, unreadable or version-mismatched table file.
class TableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A theta required by the scan grid has no stored bound curve.
class TableIncompleteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Correlators outside the self-testing region.
class RegionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gchsh
