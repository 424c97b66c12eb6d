#include "gchsh/bell.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gchsh::bell {

using linalg::Complex;
using linalg::PauliName;
using linalg::pauli;

namespace {

bool in_quarter_turn(double x) { return x >= 0.0 && x <= kPi / 2.0; }

}  // namespace

Theta::Theta(double radians) : v_(radians) {
  if (!in_quarter_turn(radians)) throw InputError("theta must lie in [0, pi/2], got " + std::to_string(radians));
}

MeasurementAngles MeasurementAngles::make(double a, double b) {
  if (!in_quarter_turn(a) || !in_quarter_turn(b))
    throw InputError("measurement angles must lie in [0, pi/2]");
  return {a, b};
}

CorrelatorPair CorrelatorPair::make(double x, double y) {
  if (!(std::abs(x) <= 2.0) || !(std::abs(y) <= 2.0))
    throw RegionError("correlators must satisfy |X| <= 2 and |Y| <= 2");
  return {x, y};
}

Observables observables(const MeasurementAngles& angles) {
  const Herm2 sh = pauli(PauliName::h), sm = pauli(PauliName::m);
  const Herm2 sz = pauli(PauliName::z), sx = pauli(PauliName::x);
  const double ca = std::cos(angles.a), sa = std::sin(angles.a);
  const double cb = std::cos(angles.b), sb = std::sin(angles.b);
  return {ca * sh + sa * sm, ca * sh - sa * sm, cb * sz + sb * sx, cb * sz - sb * sx};
}

Herm4 bell_operator(Theta theta, const MeasurementAngles& angles) {
  const Observables o = observables(angles);
  const double ct = std::cos(theta.value()), st = std::sin(theta.value());
  const Herm4 first = linalg::tensor(o.a0, o.b0 + o.b1);
  const Herm4 second = linalg::tensor(o.a1, o.b0 - o.b1);
  return kSqrt2 * (ct * first + st * second);
}

std::array<std::array<double, 2>, 2> chsh_coefficient_matrix(const MeasurementAngles& angles) {
  const double ca = std::cos(angles.a), sa = std::sin(angles.a);
  const double cb = std::cos(angles.b), sb = std::sin(angles.b);
  return {{{ca * cb, ca * sb}, {sa * cb, -sa * sb}}};
}

double local_bound(Theta theta) {
  return kQuantumBound * std::max(std::cos(theta.value()), std::sin(theta.value()));
}

double score_from_correlators(Theta theta, const CorrelatorPair& c) {
  return kSqrt2 * (std::cos(theta.value()) * c.x + std::sin(theta.value()) * c.y);
}

FrameQuantities frame_quantities(Theta theta, double b) {
  if (!in_quarter_turn(b)) throw InputError("b must lie in [0, pi/2]");
  const double t = theta.value();
  const double f = std::sqrt(std::max(0.0, 1.0 + std::cos(2.0 * b) * std::cos(2.0 * t)));
  const double zc = std::cos(b) * std::cos(t);
  const double xc = std::sin(b) * std::sin(t);
  const double norm = std::hypot(zc, xc);
  const Herm2 sz = pauli(PauliName::z), sx = pauli(PauliName::x);
  if (norm == 0.0) {
    // theta = 0 with b = pi/2 (or theta = pi/2 with b = 0): the frame operator vanishes.
    return {f, sz, sz};
  }
  return {f, (zc / norm) * sz + (xc / norm) * sx, (zc / norm) * sz - (xc / norm) * sx};
}

}  // namespace gchsh::bell
