#include "gchsh/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace gchsh::sdp {

using linalg::Complex;
using linalg::Mat4;
using linalg::Vector;

namespace {

constexpr double kMuCeiling = 1e12;
constexpr int kMaxBisections = 200;

struct Support {
  Vector<4> v;
  double m;  // <v|M|v>
  double b;  // <v|B|v>
};

// Extreme points, in the score direction, of the face of the joint numerical
// range of (M, B) exposed by M - mu B.
struct Face {
  Support low;
  Support high;
  double lambda;  // lambda_min(M - mu B)
};

Support make_support(const Vector<4>& v, const Mat4& m, const Mat4& b) {
  return {v, linalg::expectation(m, v), linalg::expectation(b, v)};
}

// Within the span of the given orthonormal vectors, the vectors minimizing and
// maximizing <v|op|v>.
std::pair<Vector<4>, Vector<4>> extremes_in_span(const std::vector<Vector<4>>& basis, const Mat4& op) {
  const std::size_t k = basis.size();
  if (k == 1) return {basis[0], basis[0]};
  std::array<Complex, 16> c{}, y{};
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) c[i * 4 + j] = linalg::inner(basis[i], op * basis[j]);
  linalg::jacobi_in_place(c, y, k);
  std::size_t lo = 0, hi = 0;
  for (std::size_t i = 1; i < k; ++i) {
    if (std::real(c[i * 4 + i]) < std::real(c[lo * 4 + lo])) lo = i;
    if (std::real(c[i * 4 + i]) > std::real(c[hi * 4 + hi])) hi = i;
  }
  auto combine = [&](std::size_t col) {
    Vector<4> v{};
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t r = 0; r < 4; ++r) v[r] += y[i * 4 + col] * basis[i][r];
    return v;
  };
  return {combine(lo), combine(hi)};
}

std::vector<Vector<4>> cluster(const linalg::EigenSystem<4>& es, bool bottom) {
  const double scale = std::max({1.0, std::abs(es.values[0]), std::abs(es.values[3])});
  const double gap = kTol.degenerate_gap * scale;
  std::vector<Vector<4>> out;
  if (bottom) {
    for (int k = 3; k >= 0 && es.values[k] <= es.values[3] + gap; --k) out.push_back(es.vector(k));
  } else {
    for (int k = 0; k < 4 && es.values[k] >= es.values[0] - gap; ++k) out.push_back(es.vector(k));
  }
  return out;
}

Face bottom_face(const Mat4& m, const Mat4& b, double mu) {
  const auto es = linalg::eig_hermitian(linalg::Herm4::hermitian_part(m - b * Complex{mu}));
  const auto basis = cluster(es, true);
  const auto [lo, hi] = extremes_in_span(basis, b);
  return {make_support(lo, m, b), make_support(hi, m, b), es.values[3]};
}

DensityMatrix mixture(const Support& first, double p, const Support& second) {
  Mat4 rho = linalg::outer(first.v, first.v) * Complex{p} + linalg::outer(second.v, second.v) * Complex{1.0 - p};
  return DensityMatrix(linalg::Herm4::hermitian_part(rho).matrix());
}

}  // namespace

Herm4 pullback_objective(const maps::QubitChannel& alice, const maps::QubitChannel& bob) {
  const Vector<4>& phi = linalg::phi_plus().amplitudes();
  Mat4 out;
  for (const auto& ka : alice.kraus_ops())
    for (const auto& kb : bob.kraus_ops()) {
      const Vector<4> w = linalg::tensor(ka, kb).adjoint() * phi;
      out += linalg::outer(w, w);
    }
  return Herm4::hermitian_part(out);
}

SdpInstance make_instance(const Herm4& objective, const Herm4& constraint_op, double threshold) {
  const auto es = linalg::eig_hermitian(objective);
  if (es.values[3] < -1e-10 || es.values[0] > 1.0 + 1e-10)
    throw InputError("objective operator must satisfy 0 <= M <= 1");
  if (!std::isfinite(threshold)) throw InputError("score threshold must be finite");
  return {objective, constraint_op, threshold};
}

bool feasible(const SdpInstance& instance) {
  const auto es = linalg::eig_hermitian(instance.constraint_op);
  return instance.threshold <= es.values[0] + kTol.feasibility;
}

double dual_function(const SdpInstance& instance, double mu) {
  const Mat4 h = instance.objective.matrix() - instance.constraint_op.matrix() * Complex{mu};
  return mu * instance.threshold + linalg::eig_hermitian(linalg::Herm4::hermitian_part(h)).values[3];
}

SdpResult solve(const SdpInstance& instance) {
  const Mat4& m = instance.objective.matrix();
  const Mat4& b = instance.constraint_op.matrix();
  const double beta = instance.threshold;

  SdpResult res;
  const auto eb = linalg::eig_hermitian(instance.constraint_op);
  if (beta > eb.values[0] + kTol.feasibility) return res;
  res.status = SdpStatus::optimal;

  auto finish_at_boundary = [&] {
    // Only states in the top eigenspace of B reach the threshold.
    const auto top = cluster(eb, false);
    const Support s = make_support(extremes_in_span(top, m).first, m, b);
    res.primal_value = s.m;
    res.dual_value = s.m;
    res.dual_multiplier = std::numeric_limits<double>::infinity();
    res.witness_state = DensityMatrix(linalg::Herm4::hermitian_part(linalg::outer(s.v, s.v)).matrix());
    return res;
  };

  const Face f0 = bottom_face(m, b, 0.0);
  if (f0.high.b >= beta) {
    res.primal_value = f0.high.m;
    res.dual_value = f0.lambda;
    res.dual_multiplier = 0.0;
    res.witness_state = DensityMatrix(linalg::Herm4::hermitian_part(linalg::outer(f0.high.v, f0.high.v)).matrix());
    return res;
  }
  if (beta >= eb.values[0]) return finish_at_boundary();

  auto finish = [&](const Support& lo, double mu_lo, double g_lo, const Support& hi, double mu_hi, double g_hi) {
    const double span = hi.b - lo.b;
    const double p = span > 0.0 ? std::clamp((hi.b - beta) / span, 0.0, 1.0) : 0.0;
    res.witness_state = mixture(lo, p, hi);
    res.primal_value = p * lo.m + (1.0 - p) * hi.m;
    if (g_lo >= g_hi) {
      res.dual_value = g_lo;
      res.dual_multiplier = mu_lo;
    } else {
      res.dual_value = g_hi;
      res.dual_multiplier = mu_hi;
    }
    return res;
  };

  double mu_lo = 0.0, g_lo = f0.lambda;
  Support s_lo = f0.high;
  double mu_hi = 1.0;
  Support s_hi{};
  double g_hi = 0.0;
  for (;;) {
    const Face f = bottom_face(m, b, mu_hi);
    const double g = mu_hi * beta + f.lambda;
    if (f.low.b >= beta) {
      s_hi = f.low;
      g_hi = g;
      break;
    }
    if (f.high.b >= beta) return finish(f.low, mu_hi, g, f.high, mu_hi, g);
    mu_lo = mu_hi;
    s_lo = f.high;
    g_lo = g;
    mu_hi *= 4.0;
    if (mu_hi > kMuCeiling) return finish_at_boundary();
  }

  for (int it = 0; it < kMaxBisections && mu_hi - mu_lo > 1e-15 * mu_hi; ++it) {
    const double mid = 0.5 * (mu_lo + mu_hi);
    if (mid <= mu_lo || mid >= mu_hi) break;
    const Face f = bottom_face(m, b, mid);
    const double g = mid * beta + f.lambda;
    if (f.high.b < beta) {
      mu_lo = mid;
      s_lo = f.high;
      g_lo = g;
    } else if (f.low.b >= beta) {
      mu_hi = mid;
      s_hi = f.low;
      g_hi = g;
    } else {
      return finish(f.low, mid, g, f.high, mid, g);
    }
  }
  return finish(s_lo, mu_lo, g_lo, s_hi, mu_hi, g_hi);
}

}  // namespace gchsh::sdp
