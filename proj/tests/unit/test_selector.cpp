#include <doctest.h>

#include <fstream>
#include <random>

#include "gchsh/selector.hpp"
#include "support/curves.hpp"
#include "support/tempdir.hpp"

using namespace gchsh;
using namespace gchsh::selector;

namespace {

bounds::BoundCurve synthetic_curve(double theta) {
  bounds::BoundCurve c;
  c.theta = Theta(theta);
  c.beta_local = bell::local_bound(c.theta);
  c.beta_trivial = c.beta_local + 0.2 * (kQuantumBound - c.beta_local);
  c.slope_star = 0.5 / (kQuantumBound - c.beta_trivial);
  c.beta_star = c.beta_trivial;
  c.fidelity_star = 0.5;
  return c;
}

std::vector<bounds::BoundCurve> synthetic_table(const ThetaGrid& grid) {
  std::vector<bounds::BoundCurve> t;
  for (double th : grid.values()) t.push_back(synthetic_curve(th));
  return t;
}

const ThetaGrid kSmallGrid{kPi / 32, kPi / 4, 8};

NormalizedCorrelators norm(double x, double y) { return normalize(CorrelatorPair::make(x, y)); }

}  // namespace

TEST_SUITE("selector") {
  TEST_CASE("normalize") {
    auto n = norm(-1.9, 0.3);
    CHECK(n.x == 1.9);
    CHECK(n.y == 0.3);
    CHECK(n.transform_log == std::vector<std::string>{"negate_x"});
    n = norm(0.3, 1.9);
    CHECK(n.x == 1.9);
    CHECK(n.y == 0.3);
    CHECK(n.transform_log == std::vector<std::string>{"swap_xy"});
    n = norm(1.5, 1.5);
    CHECK(n.x == 1.5);
    CHECK(n.transform_log.empty());
    n = norm(-0.2, -1.0);
    CHECK(n.x == 1.0);
    CHECK(n.y == 0.2);
    CHECK(n.transform_log == std::vector<std::string>{"negate_x", "negate_y", "swap_xy"});
  }

  TEST_CASE("region") {
    CHECK(in_region(norm(2.0, 0.0)));
    CHECK(in_region(norm(kSqrt2, kSqrt2)));
    CHECK_FALSE(in_region(norm(1.8, 1.8)));
    CHECK(region_violation(norm(1.8, 1.8)) == RegionViolation::quantum);
    CHECK(region_violation(norm(1.0, 0.5)) == RegionViolation::local);
    CHECK(in_region(norm(1.9, 0.6)));
  }

  TEST_CASE("theta grid") {
    const auto v = ThetaGrid{}.values();
    CHECK(v.size() == 500);
    CHECK(v.front() == kPi / 64);
    CHECK(v.back() == kPi / 4);
    CHECK(ThetaGrid{kPi / 8, kPi / 4, 1}.values() == std::vector<double>{kPi / 4});
    CHECK_THROWS_AS((ThetaGrid{0.0, kPi / 4, 5}.validate()), InputError);
    CHECK_THROWS_AS((ThetaGrid{kPi / 8, kPi / 4, 0}.validate()), InputError);
  }

  TEST_CASE("tsirelson point selects chsh") {
    const auto table = synthetic_table(kSmallGrid);
    const auto r = select(norm(kSqrt2, kSqrt2), table, kSmallGrid);
    CHECK(r.theta_best.value() == kPi / 4);
    CHECK(r.fidelity_bound == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.in_region);
  }

  TEST_CASE("ties go to pi/4") {
    const auto table = synthetic_table(kSmallGrid);
    const auto r = select(norm(2.0, 0.0), table, kSmallGrid);
    CHECK(r.fidelity_bound == 0.5);
    CHECK(r.theta_best.value() == kPi / 4);
  }

  TEST_CASE("errors") {
    const auto table = synthetic_table(kSmallGrid);
    CHECK_THROWS_AS(select(norm(1.0, 0.5), table, kSmallGrid), RegionError);
    CHECK_THROWS_AS(select(norm(1.8, 1.8), table, kSmallGrid), RegionError);
    auto partial = table;
    partial.erase(partial.begin() + 3);
    CHECK_THROWS_AS(select(norm(1.9, 0.6), partial, kSmallGrid), TableIncompleteError);
    CHECK_THROWS_AS(mesh(0.0, table, kSmallGrid), InputError);
    CHECK_THROWS_AS(mesh(-1.0, table, kSmallGrid), InputError);
  }

  TEST_CASE("selection is the grid maximum") {
    const auto table = synthetic_table(kSmallGrid);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 0; n < 200; ++n) {
      const double r = 2.0 * std::sqrt(u(rng)), phi = u(rng) * kPi / 4;
      const auto c = NormalizedCorrelators{r * std::cos(phi), r * std::sin(phi), {}};
      if (!in_region(c)) continue;
      const auto s = select(c, table, kSmallGrid);
      for (const auto& curve : table) {
        const double beta = std::min(bell::score_from_correlators(curve.theta, {c.x, c.y}), kQuantumBound);
        CHECK(s.fidelity_bound >= bounds::bound_at(curve, beta) - 1e-12);
      }
      CHECK(s.fidelity_bound >= 0.5);
      CHECK(s.fidelity_bound <= 1.0);
      const auto swapped = select(norm(c.y, c.x), table, kSmallGrid);
      CHECK(swapped.fidelity_bound == s.fidelity_bound);
    }
  }

  TEST_CASE("real curves on the diagonal and off it") {
    const ThetaGrid grid{kPi / 8, kPi / 4, 2};
    const std::vector<bounds::BoundCurve> table = {fixture::eighth_curve(), fixture::chsh_curve()};
    for (double x : {1.0, 1.1, 1.2, 1.3, kSqrt2}) {
      const auto r = select(norm(x, x), table, grid);
      CHECK(r.fidelity_bound == doctest::Approx(bounds::bound_at(fixture::chsh_curve(), 2 * x)).epsilon(1e-6));
    }
    const auto r = select(norm(1.9, 0.6), table, grid);
    CHECK(r.fidelity_bound >= bounds::bound_at(fixture::chsh_curve(), 2.5) - 1e-6);
  }

  TEST_CASE("mesh at delta 0.5") {
    const auto table = synthetic_table(kSmallGrid);
    const auto m = mesh(0.5, table, kSmallGrid);
    auto has = [&](double x, double y) {
      return std::any_of(m.begin(), m.end(), [&](const MeshRecord& r) {
        return std::abs(r.x - x) < 1e-12 && std::abs(r.y - y) < 1e-12;
      });
    };
    CHECK(has(2.0, 0.0));
    CHECK(has(1.5, 0.5));
    CHECK(has(1.0, 1.0));
    CHECK_FALSE(has(2.0, 1.0));
    CHECK_FALSE(has(1.5, 1.5));
    CHECK(has(1.5, 1.0));
    CHECK(m.size() == 4);
    for (const auto& r : m) {
      CHECK(r.fidelity_bound >= 0.5);
      CHECK(r.fidelity_bound <= 1.0);
      CHECK(r.x >= r.y);
    }
  }

  TEST_CASE("mesh csv") {
    fixture::TempDir dir;
    const auto table = synthetic_table(kSmallGrid);
    const auto m = mesh(0.25, table, kSmallGrid);
    write_mesh_csv(m, dir / "mesh.csv");
    std::ifstream in(dir / "mesh.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "X,Y,fidelity,theta");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == m.size());
    CHECK_THROWS_AS(write_mesh_csv(m, "/nonexistent-dir/x/mesh.csv"), std::runtime_error);
  }

  TEST_CASE("fidelity grows along rays") {
    const auto table = synthetic_table(kSmallGrid);
    for (double phi : {0.05, 0.2, 0.4, 0.6, kPi / 4}) {
      double prev = 0.0;
      for (double r = 1.2; r <= 2.0; r += 0.01) {
        const NormalizedCorrelators c{r * std::cos(phi), r * std::sin(phi), {}};
        if (!in_region(c)) continue;
        const double f = select(c, table, kSmallGrid).fidelity_bound;
        CHECK(f >= prev - 1e-12);
        prev = f;
      }
    }
  }
}
