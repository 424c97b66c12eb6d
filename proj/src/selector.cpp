#include "gchsh/selector.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gchsh/table_io.hpp"

namespace gchsh::selector {

namespace {

constexpr double kRegionTol = 1e-12;
constexpr double kTieTol = 1e-12;

}  // namespace

NormalizedCorrelators normalize(const CorrelatorPair& c) {
  NormalizedCorrelators n{c.x, c.y, {}};
  if (n.x < 0.0) {
    n.x = -n.x;
    n.transform_log.emplace_back("negate_x");
  }
  if (n.y < 0.0) {
    n.y = -n.y;
    n.transform_log.emplace_back("negate_y");
  }
  if (n.x < n.y) {
    std::swap(n.x, n.y);
    n.transform_log.emplace_back("swap_xy");
  }
  return n;
}

RegionViolation region_violation(const NormalizedCorrelators& n) {
  if (n.x + n.y < 2.0 - kRegionTol) return RegionViolation::local;
  if (n.x * n.x + n.y * n.y > 4.0 + kRegionTol) return RegionViolation::quantum;
  return RegionViolation::none;
}

bool in_region(const NormalizedCorrelators& n) { return region_violation(n) == RegionViolation::none; }

std::vector<double> ThetaGrid::values() const {
  std::vector<double> v;
  if (count == 1) return {hi};
  v.reserve(count);
  for (int i = 0; i < count; ++i) v.push_back(i == count - 1 ? hi : lo + (hi - lo) * i / (count - 1));
  return v;
}

void ThetaGrid::validate() const {
  if (count < 1) throw InputError("theta grid needs at least one point");
  if (!(lo <= hi)) throw InputError("theta grid lower end exceeds the upper end");
  if (lo < kThetaSupportedMin - 1e-12 || hi > kThetaSupportedMax + 1e-12)
    throw InputError("theta grid must lie inside [pi/64, pi/4]");
}

SelectionResult select(const NormalizedCorrelators& n, const std::vector<bounds::BoundCurve>& table,
                       const ThetaGrid& grid) {
  grid.validate();
  switch (region_violation(n)) {
    case RegionViolation::local:
      throw RegionError("X + Y < 2: correlators admit a local model");
    case RegionViolation::quantum:
      throw RegionError("X^2 + Y^2 > 4: correlators exceed the quantum set");
    case RegionViolation::none:
      break;
  }
  const auto thetas = grid.values();
  SelectionResult best;
  best.in_region = true;
  best.normalized = n;
  bool first = true;
  for (auto it = thetas.rbegin(); it != thetas.rend(); ++it) {
    const Theta theta(*it);
    const bounds::BoundCurve* curve = table::find_curve(table, theta);
    if (!curve) {
      std::ostringstream os;
      os << "no bound curve for theta = " << *it;
      throw TableIncompleteError(os.str());
    }
    const double beta = std::min(bell::score_from_correlators(theta, {n.x, n.y}), kQuantumBound);
    const double f = bounds::bound_at(*curve, beta);
    if (first || f > best.fidelity_bound + kTieTol) {
      best.theta_best = theta;
      best.beta_at_best = beta;
      best.fidelity_bound = f;
      first = false;
    }
  }
  return best;
}

std::vector<MeshRecord> mesh(double delta, const std::vector<bounds::BoundCurve>& table, const ThetaGrid& grid) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InputError("mesh delta must be positive");
  std::vector<MeshRecord> out;
  const int steps = static_cast<int>(std::floor(2.0 / delta + 1e-9));
  for (int i = 0; i <= steps; ++i) {
    const double x = i * delta;
    for (int j = 0; j <= i; ++j) {
      const NormalizedCorrelators n{x, j * delta, {}};
      if (!in_region(n)) continue;
      const SelectionResult r = select(n, table, grid);
      out.push_back({n.x, n.y, r.fidelity_bound, r.theta_best.value()});
    }
  }
  return out;
}

void write_mesh_csv(const std::vector<MeshRecord>& records, const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.precision(12);
    out << "X,Y,fidelity,theta\n";
    for (const auto& r : records) out << r.x << ',' << r.y << ',' << r.fidelity_bound << ',' << r.theta_best << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot replace " + path.string());
  }
}

}  // namespace gchsh::selector
