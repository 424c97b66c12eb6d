#include <doctest.h>

#include <fstream>

#include "gchsh/table_io.hpp"
#include "support/curves.hpp"
#include "support/tempdir.hpp"

using namespace gchsh;
using namespace gchsh::bounds;

namespace {

BoundCurve synthetic_curve(double theta, double beta_t) {
  BoundCurve c;
  c.theta = Theta(theta);
  c.beta_local = bell::local_bound(c.theta);
  c.beta_trivial = beta_t;
  c.beta_star = beta_t + 0.1;
  c.slope_star = 0.5 / (kQuantumBound - beta_t);
  c.fidelity_star = 1.0 - c.slope_star * (kQuantumBound - c.beta_star);
  c.sweep = {{c.beta_local, 0.4}, {c.beta_local - 0.025, 0.39}};
  return c;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_SUITE("bounds") {
  TEST_CASE("slope") {
    CHECK(slope(kQuantumBound - 1, 1.0) == 0.0);
    const double fl = (2 + kSqrt2) / 8;
    CHECK(slope(2.0, fl) == doctest::Approx((1 - fl) / (kQuantumBound - 2)).epsilon(1e-15));
    CHECK(slope(2.0, fl) == doctest::Approx(0.69194).epsilon(1e-5));
    CHECK(slope(2.3, 0.5) > slope(2.3, 0.6));
    CHECK_THROWS_AS(slope(kQuantumBound, 1.0), DomainError);
  }

  TEST_CASE("score step") {
    CHECK(score_step(Theta(kPi / 4), 0.025) == doctest::Approx(0.025).epsilon(1e-15));
    CHECK(score_step(Theta(kPi / 8), 0.025) == doctest::Approx(0.00625).epsilon(1e-15));
  }

  TEST_CASE("supported range") {
    CHECK_NOTHROW(check_supported(Theta(kPi / 64)));
    CHECK_NOTHROW(check_supported(Theta(kPi / 4)));
    CHECK_THROWS_AS(check_supported(Theta(0.0)), InputError);
    CHECK_THROWS_AS(check_supported(Theta(kPi / 3)), InputError);
    CHECK_THROWS_AS(compute_curve(Theta(0.01), {}), InputError);
  }

  TEST_CASE("bound at the closed-form trivial score") {
    const auto c = synthetic_curve(kPi / 4, fixture::chsh_trivial_score());
    CHECK(bound_at(c, c.beta_trivial) == 0.5);
    CHECK(bound_at(c, 2.0) == 0.5);
    CHECK(bound_at(c, kQuantumBound) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(bound_at(c, kQuantumBound + 5e-13) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(bound_at(c, 2.6) == doctest::Approx(0.842).epsilon(1e-3));
    CHECK_THROWS_AS(bound_at(c, 3.0), DomainError);
    CHECK_THROWS_AS(bound_at(c, kQuantumBound + 1e-9), DomainError);
    CHECK(roof_line(c, c.beta_trivial) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(roof_line(c, 2.5) == doctest::Approx(bound_at(c, 2.5)).epsilon(1e-12));
  }

  TEST_CASE("trivial score needs an inflection") {
    ScoreSweep s;
    s.points = {{2.0, 0.43}};
    CHECK_THROWS_AS(trivial_score(s), SweepIncompleteError);
  }

  TEST_CASE("chsh sweep") {
    const auto& c = fixture::chsh_curve();
    REQUIRE(c.sweep.size() >= 2);
    CHECK(c.sweep.front().score == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(c.sweep.front().min_fidelity >= 0.42);
    CHECK(c.sweep.front().min_fidelity <= 0.44);
    for (std::size_t k = 1; k < c.sweep.size(); ++k) {
      CHECK(c.sweep[k - 1].score - c.sweep[k].score == doctest::Approx(0.025).epsilon(1e-12));
      CHECK(c.sweep[k].min_fidelity <= c.sweep[k - 1].min_fidelity + 1e-12);
    }
    CHECK(std::abs(c.beta_trivial - fixture::chsh_trivial_score()) <= 0.01);
    CHECK(c.beta_trivial >= c.beta_local - 1e-9);
    CHECK(bound_at(c, c.beta_trivial) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(roof_line(c, c.beta_trivial) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(c.seed == optim::AngleSearchConfig{}.seed);
    CHECK(c.restarts == 12);
  }

  TEST_CASE("sweep at pi/8") {
    const auto& c = fixture::eighth_curve();
    CHECK(c.kappa == 0.025);
    REQUIRE(c.sweep.size() >= 2);
    CHECK(c.sweep[0].score - c.sweep[1].score == doctest::Approx(0.00625).epsilon(1e-12));
    CHECK(c.beta_trivial > c.beta_local);
    CHECK(c.beta_trivial < kQuantumBound);
    CHECK(bound_at(c, c.beta_trivial) == doctest::Approx(0.5).epsilon(1e-9));
  }

  TEST_CASE("roof stays below the swept minima") {
    for (const auto* c : {&fixture::chsh_curve(), &fixture::eighth_curve()})
      for (const auto& p : c->sweep) {
        CHECK(roof_line(*c, p.score) <= p.min_fidelity + 1e-6);
        CHECK(bound_at(*c, p.score) <= std::max(0.5, p.min_fidelity) + 1e-6);
      }
  }

  TEST_CASE("table round trip") {
    fixture::TempDir dir;
    const auto path = dir / "t.json";
    const std::vector<BoundCurve> curves = {fixture::eighth_curve(), fixture::chsh_curve()};
    table::save_table(curves, path);
    const auto loaded = table::load_table(path);
    REQUIRE(loaded.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(loaded[i].theta.value() == table::stored(curves[i].theta.value()));
      CHECK(loaded[i].beta_trivial == table::stored(curves[i].beta_trivial));
      CHECK(loaded[i].slope_star == table::stored(curves[i].slope_star));
      CHECK(loaded[i].seed == curves[i].seed);
      REQUIRE(loaded[i].sweep.size() == curves[i].sweep.size());
      for (std::size_t k = 0; k < curves[i].sweep.size(); ++k)
        CHECK(loaded[i].sweep[k].min_fidelity == table::stored(curves[i].sweep[k].min_fidelity));
    }
    // A second round trip reproduces the stored representation exactly.
    table::save_table(loaded, dir / "u.json");
    const auto again = table::load_table(dir / "u.json");
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(again[i].beta_trivial == loaded[i].beta_trivial);
      CHECK(again[i].sweep == loaded[i].sweep);
    }
    CHECK(table::find_curve(loaded, Theta(kPi / 8)) != nullptr);
    CHECK(table::find_curve(loaded, Theta(kPi / 16)) == nullptr);
  }

  TEST_CASE("upsert keeps one record per theta") {
    table::TableFile t;
    table::upsert(t, synthetic_curve(kPi / 4, 2.2));
    table::upsert(t, synthetic_curve(kPi / 8, 2.7));
    table::upsert(t, synthetic_curve(kPi / 4, 2.1));
    REQUIRE(t.curves.size() == 2);
    CHECK(t.curves[0].theta.value() < t.curves[1].theta.value());
    CHECK(t.curves[1].beta_trivial == 2.1);
  }

  TEST_CASE("bad table files") {
    fixture::TempDir dir;
    write_text(dir / "empty.json", "");
    CHECK_THROWS_AS(table::load_table(dir / "empty.json"), TableError);
    write_text(dir / "junk.json", "{not json");
    CHECK_THROWS_AS(table::load_table(dir / "junk.json"), TableError);
    CHECK_THROWS_AS(table::load_table(dir / "missing.json"), TableError);

    table::save_table(std::vector<BoundCurve>{synthetic_curve(kPi / 4, 2.1)}, dir / "ok.json");
    std::ifstream in(dir / "ok.json");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto replace = [&](const std::string& from, const std::string& to) {
      std::string s = text;
      const auto pos = s.find(from);
      REQUIRE(pos != std::string::npos);
      s.replace(pos, from.size(), to);
      return s;
    };
    write_text(dir / "version.json", replace("\"version\": 1", "\"version\": 7"));
    CHECK_THROWS_AS(table::load_table(dir / "version.json"), TableError);
    write_text(dir / "theta.json", replace("\"theta\": 0.785398163397", "\"theta\": 1.2"));
    CHECK_THROWS_AS(table::load_table(dir / "theta.json"), TableError);
    write_text(dir / "theta0.json", replace("\"theta\": 0.785398163397", "\"theta\": 0.0"));
    CHECK_THROWS_AS(table::load_table(dir / "theta0.json"), TableError);
  }

  TEST_CASE("unwritable table path") {
    CHECK_THROWS_AS(table::save_table(std::vector<BoundCurve>{}, "/nonexistent-dir/x/t.json"), TableError);
  }

  TEST_CASE("sweep restarted from a saved parameter grid") {
    fixture::TempDir dir;
    const auto& alice = fixture::alice_table(kPi / 4);
    table::TableFile t;
    table::upsert(t, fixture::chsh_curve());
    table::upsert(t, table::AliceGridRecord{alice.theta(), alice.grid()});
    table::save_table(t, dir / "t.json");
    const auto loaded = table::load_table_file(dir / "t.json");
    const auto* rec = table::find_alice_grid(loaded, Theta(kPi / 4));
    REQUIRE(rec != nullptr);
    const auto restored = maps::AliceParamTable::from_grid(rec->theta, rec->grid);
    const auto c = compute_curve(restored, {});
    CHECK(std::abs(c.beta_trivial - fixture::chsh_curve().beta_trivial) < 1e-6);
    CHECK(table::stored(c.beta_trivial) == doctest::Approx(loaded.curves[0].beta_trivial).epsilon(1e-6));
  }
}
