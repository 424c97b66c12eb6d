#include "gchsh/maps.hpp"

#include <algorithm>
#include <cmath>

#include "gchsh/nelder_mead.hpp"

namespace gchsh::maps {

using linalg::Complex;
using linalg::Mat4;
using linalg::PauliName;
using linalg::pauli;

namespace {

constexpr double kThetaCHSH = kPi / 4.0;

void check_angle(double x, const char* what) {
  if (!(x >= 0.0 && x <= kPi / 2.0)) throw InputError(std::string(what) + " must lie in [0, pi/2]");
}

QubitChannel dephasing(double g, const Mat2& gamma, const Mat2& unitary) {
  const double keep = std::sqrt(std::max(0.0, (1.0 + g) / 2.0));
  const double flip = std::sqrt(std::max(0.0, (1.0 - g) / 2.0));
  return QubitChannel({unitary * Complex{keep}, unitary * gamma * Complex{flip}});
}

// Bloch action of Alice's map restricted to the (sigma_h, sigma_m) plane:
// R(omega - d) diag(1, g) R(d).
std::array<double, 2> alice_bloch(double a_cos, double a_sin, double g, double omega, double d) {
  const double cd = std::cos(d), sd = std::sin(d);
  double x = cd * a_cos - sd * a_sin;
  double y = sd * a_cos + cd * a_sin;
  y *= g;
  const double co = std::cos(omega - d), so = std::sin(omega - d);
  return {co * x - so * y, so * x + co * y};
}

}  // namespace

QubitChannel::QubitChannel(std::vector<Mat2> kraus_ops) : kraus_(std::move(kraus_ops)) {
  if (kraus_.empty()) throw InputError("a channel needs at least one Kraus operator");
  if (completeness_error() > kTol.kraus) throw InputError("Kraus operators are not trace preserving");
}

QubitChannel QubitChannel::identity() { return QubitChannel({Mat2::identity()}); }

Mat2 QubitChannel::apply(const Mat2& rho) const {
  Mat2 out;
  for (const auto& k : kraus_) out += k * rho * k.adjoint();
  return out;
}

double QubitChannel::completeness_error() const {
  Mat2 sum;
  for (const auto& k : kraus_) sum += k.adjoint() * k;
  return (sum - Mat2::identity()).max_abs();
}

double strength_g(double a) {
  check_angle(a, "a");
  return std::clamp((1.0 + kSqrt2) * (std::cos(a) + std::sin(a) - 1.0), 0.0, 1.0);
}

double continuation_angle(Theta theta, double b) {
  check_angle(b, "b");
  const double t = theta.value();
  if (t == 0.0 || t == kPi / 2.0) throw DomainError("the strength continuation is singular at theta = 0 and pi/2");
  if (std::abs(t - kThetaCHSH) < 1e-12) return b;
  // gamma = (4/pi) ln((pi/2 - theta)/theta), delta = theta^2 / (pi/2 - 2 theta)
  const double gap = kPi / 2.0 - 2.0 * t;
  const double gamma = (4.0 / kPi) * std::log1p(gap / t);
  const double delta = t * t / gap;
  return std::clamp(std::log1p(b / delta) / gamma, 0.0, kPi / 2.0);
}

double strength_g_tilde(Theta theta, double b) { return strength_g(continuation_angle(theta, b)); }

QubitChannel bob_channel(Theta theta, double b) {
  const double g = strength_g_tilde(theta, b);
  const auto gamma = b <= theta.value() ? pauli(PauliName::z) : pauli(PauliName::x);
  return dephasing(g, gamma.matrix(), Mat2::identity());
}

AliceMapParams axis_dephasing_params(double a) {
  return {0.0, a <= kPi / 4.0 ? 0.0 : kPi / 2.0, strength_g(a)};
}

QubitChannel alice_channel(Theta /*theta*/, double a, const AliceMapParams& params) {
  check_angle(a, "a");
  const double g = std::clamp(params.g, 0.0, 1.0);
  const Mat2 gamma =
      (std::cos(params.d) * pauli(PauliName::h) - std::sin(params.d) * pauli(PauliName::m)).matrix();
  // exp(+i omega sigma_y / 2) rotates (sigma_h, sigma_m) Bloch components by +omega.
  const Mat2 u = Mat2::identity() * Complex{std::cos(params.omega / 2.0)} +
                 pauli(PauliName::y).matrix() * Complex{0.0, std::sin(params.omega / 2.0)};
  return dephasing(g, gamma, u);
}

FrameEvaluation frame_fidelities(Theta theta, double a, double omega, double d) {
  const double g = strength_g(a);
  const double ca = std::cos(a), sa = std::sin(a);
  const auto up = alice_bloch(ca, sa, g, omega, d);
  const auto down = alice_bloch(ca, -sa, g, omega, d);
  const double r = 1.0 / kSqrt2;
  return {0.25 * (1.0 + r * (up[0] + up[1])), 0.25 * (1.0 + r * (down[0] - down[1])),
          kQuantumBound * std::cos(theta.value()), kQuantumBound * std::sin(theta.value())};
}

double alice_objective(Theta theta, double a, double omega, double d) {
  const FrameEvaluation fe = frame_fidelities(theta, a, omega, d);
  return std::max((1.0 - fe.f_up) / (kQuantumBound - fe.s_up), (1.0 - fe.f_down) / (kQuantumBound - fe.s_down));
}

namespace {

// Best of the candidates, keeping the first one unless another improves on it
// by more than 1e-12.
AliceMapParams pick_best(Theta theta, double a, const std::vector<AliceMapParams>& candidates) {
  AliceMapParams best = candidates.front();
  double best_f = alice_objective(theta, a, best.omega, best.d);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double f = alice_objective(theta, a, candidates[i].omega, candidates[i].d);
    if (f < best_f - 1e-12) {
      best_f = f;
      best = candidates[i];
    }
  }
  return best;
}

AliceMapParams local_search(Theta theta, double a, double omega0, double d0, const AliceSearchOptions& opt,
                            double step) {
  optim::NelderMeadOptions<2> nm;
  nm.f_tol = opt.tol;
  nm.x_tol = opt.tol;
  nm.max_iters = opt.max_iters;
  nm.initial_step = step;
  const auto res = optim::nelder_mead<2>(
      [&](const optim::Point<2>& x) { return alice_objective(theta, a, x[0], x[1]); }, {omega0, d0}, nm);
  return {res.x[0], res.x[1], strength_g(a)};
}

}  // namespace

AliceMapParams optimize_alice_params(Theta theta, double a, const AliceSearchOptions& opt) {
  check_angle(a, "a");
  const double g = strength_g(a);
  static constexpr std::array<std::array<double, 2>, 8> kStarts{{{0.0, 0.0},
                                                                 {0.0, kPi / 2.0},
                                                                 {kPi / 8.0, 0.0},
                                                                 {-kPi / 8.0, 0.0},
                                                                 {0.0, kPi / 4.0},
                                                                 {0.0, -kPi / 4.0},
                                                                 {kPi / 8.0, kPi / 2.0},
                                                                 {-kPi / 8.0, kPi / 2.0}}};
  std::vector<AliceMapParams> candidates{axis_dephasing_params(a), {0.0, 0.0, g}};
  const int starts = std::max(1, opt.starts);
  for (int i = 0; i < starts; ++i) {
    // Beyond the fixed starts, spread extra ones over a coarse (omega, d) lattice.
    double w, d;
    if (i < static_cast<int>(kStarts.size())) {
      w = kStarts[i][0];
      d = kStarts[i][1];
    } else {
      const int j = i - static_cast<int>(kStarts.size());
      w = -kPi / 4.0 + (kPi / 2.0) * ((j * 7) % 11) / 10.0;
      d = -kPi / 2.0 + kPi * ((j * 3) % 13) / 12.0;
    }
    candidates.push_back(local_search(theta, a, w, d, opt, 0.2));
  }
  return pick_best(theta, a, candidates);
}

AliceParamTable AliceParamTable::build(Theta theta, const AliceSearchOptions& opt) {
  const int n = std::max(2, opt.grid_size);
  std::vector<AliceGridPoint> grid;
  grid.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double a = (kPi / 2.0) * (static_cast<double>(i) / (n - 1));
    const AliceMapParams p = optimize_alice_params(theta, a, opt);
    grid.push_back({a, p.omega, p.d});
  }
  return AliceParamTable(theta, std::move(grid), opt);
}

AliceParamTable AliceParamTable::from_grid(Theta theta, std::vector<AliceGridPoint> grid,
                                           const AliceSearchOptions& opt) {
  if (grid.empty()) throw InputError("empty Alice parameter grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i].a > grid[i - 1].a)) throw InputError("Alice parameter grid must be strictly increasing in a");
  return AliceParamTable(theta, std::move(grid), opt);
}

AliceMapParams AliceParamTable::params_at(double a) const {
  check_angle(a, "a");
  auto it = std::lower_bound(grid_.begin(), grid_.end(), a,
                             [](const AliceGridPoint& p, double x) { return p.a < x; });
  if (it == grid_.end()) {
    --it;
  } else if (it != grid_.begin() && std::abs(std::prev(it)->a - a) < std::abs(it->a - a)) {
    --it;
  }
  const double g = strength_g(a);
  if (std::abs(it->a - a) <= 1e-14) return {it->omega, it->d, g};

  std::vector<AliceMapParams> candidates{axis_dephasing_params(a), {it->omega, it->d, g}};
  candidates.push_back(local_search(theta_, a, it->omega, it->d, opt_, 0.05));
  return pick_best(theta_, a, candidates);
}

DensityMatrix apply_product_channel(const QubitChannel& alice, const QubitChannel& bob, const DensityMatrix& rho) {
  Mat4 out;
  for (const auto& ka : alice.kraus_ops())
    for (const auto& kb : bob.kraus_ops()) {
      const Mat4 k = linalg::tensor(ka, kb);
      out += k * rho.matrix() * k.adjoint();
    }
  return DensityMatrix(linalg::Herm4::hermitian_part(out).matrix());
}

}  // namespace gchsh::maps
