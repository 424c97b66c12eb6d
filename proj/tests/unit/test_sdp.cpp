#include <doctest.h>

#include <random>

#include "gchsh/sdp.hpp"
#include "support/oracles.hpp"

using namespace gchsh;
using namespace gchsh::sdp;
using linalg::Complex;
using linalg::Herm4;
using linalg::Mat2;
using linalg::Mat4;
using linalg::pauli;

namespace {

struct RandomInstance {
  SdpInstance inst;
  maps::QubitChannel alice;
  maps::QubitChannel bob;
};

RandomInstance random_instance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const bell::Theta th(kPi / 64 + u(rng) * (kPi / 4 - kPi / 64));
  const bell::MeasurementAngles ang{u(rng) * kPi / 2, u(rng) * kPi / 2};
  const maps::AliceMapParams p{(u(rng) - 0.5) * 2 * kPi, (u(rng) - 0.5) * 2 * kPi, maps::strength_g(ang.a)};
  auto alice = maps::alice_channel(th, ang.a, p);
  auto bob = maps::bob_channel(th, ang.b);
  const Herm4 b = bell::bell_operator(th, ang);
  const auto es = linalg::eig_hermitian(b);
  const double beta = es.values[3] + (0.05 + 0.9 * u(rng)) * (es.values[0] - es.values[3]);
  return {make_instance(pullback_objective(alice, bob), b, beta), alice, bob};
}

maps::QubitChannel full_dephasing(const Mat2& gamma) {
  return maps::QubitChannel({Mat2::identity() * Complex{std::sqrt(0.5)}, gamma * Complex{std::sqrt(0.5)}});
}

SdpInstance unrotated_corner(double beta) {
  const bell::Theta th(kPi / 4);
  const auto alice = maps::alice_channel(th, 0.0, maps::axis_dephasing_params(0.0));
  const auto bob = maps::bob_channel(th, 0.0);
  return make_instance(pullback_objective(alice, bob), bell::bell_operator(th, {0.0, 0.0}), beta);
}

}  // namespace

TEST_SUITE("sdp") {
  TEST_CASE("pullback of identity channels is the target projector") {
    const auto id = maps::QubitChannel::identity();
    CHECK((pullback_objective(id, id).matrix() - linalg::phi_plus().projector()).max_abs() < 1e-15);
  }

  TEST_CASE("pullback of full z dephasing on both sides") {
    const auto deph = full_dephasing(pauli("z").matrix());
    const linalg::PureState phi_minus(linalg::Vector<4>{1 / kSqrt2, 0.0, 0.0, -1 / kSqrt2});
    const Mat4 expected = (linalg::phi_plus().projector() + phi_minus.projector()) * Complex{0.5};
    CHECK((pullback_objective(deph, deph).matrix() - expected).max_abs() < 1e-15);
  }

  TEST_CASE("pullback agrees with applying the channels") {
    std::mt19937_64 rng(31);
    for (int n = 0; n < 50; ++n) {
      const auto ri = random_instance(rng);
      const linalg::DensityMatrix rho(oracle::random_density(rng));
      const double direct =
          linalg::fidelity_with_pure(maps::apply_product_channel(ri.alice, ri.bob, rho), linalg::phi_plus());
      CHECK(linalg::trace_product(ri.inst.objective.matrix(), rho.matrix()) == doctest::Approx(direct).epsilon(1e-12));
    }
  }

  TEST_CASE("feasibility") {
    const bell::Theta chsh(kPi / 4);
    const Herm4 opt = bell::bell_operator(chsh, {kPi / 4, kPi / 4});
    const Herm4 m = Herm4::hermitian_part(linalg::phi_plus().projector());
    CHECK(feasible({m, opt, kQuantumBound}));
    CHECK_FALSE(feasible({m, bell::bell_operator(chsh, {0.0, 0.0}), 2.5}));
    CHECK(feasible({m, bell::bell_operator(chsh, {0.3, 1.1}), -kQuantumBound}));
    const auto r = solve({m, bell::bell_operator(chsh, {0.0, 0.0}), 2.5});
    CHECK(r.status == SdpStatus::infeasible);
    CHECK_FALSE(r.witness_state.has_value());
  }

  TEST_CASE("instance validation") {
    const Herm4 big = 2.0 * Herm4(Mat4::identity());
    CHECK_THROWS_AS(make_instance(big, big, 0.0), InputError);
  }

  TEST_CASE("tsirelson point has fidelity one") {
    const bell::Theta chsh(kPi / 4);
    const auto id = maps::QubitChannel::identity();
    const auto r = solve(make_instance(pullback_objective(id, id), bell::bell_operator(chsh, {kPi / 4, kPi / 4}),
                                       kQuantumBound));
    REQUIRE(r.status == SdpStatus::optimal);
    CHECK(r.primal_value == doctest::Approx(1.0).epsilon(1e-9));
    REQUIRE(r.witness_state);
    CHECK(linalg::fidelity_with_pure(*r.witness_state, linalg::phi_plus()) == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("chsh corner at the local bound") {
    const auto r = solve(unrotated_corner(2.0));
    REQUIRE(r.status == SdpStatus::optimal);
    CHECK(std::abs(r.primal_value - (2 + kSqrt2) / 8) < 1e-9);
    CHECK(r.primal_value - r.dual_value <= 1e-7);
  }

  TEST_CASE("primal value below sampled feasible states") {
    std::mt19937_64 rng(41);
    for (int n = 0; n < 10; ++n) {
      const auto ri = random_instance(rng);
      const auto r = solve(ri.inst);
      REQUIRE(r.status == SdpStatus::optimal);
      int sampled = 0;
      for (int k = 0; k < 20000 && sampled < 1000; ++k) {
        const Mat4 rho = oracle::random_density(rng, 1 + k % 4);
        if (linalg::trace_product(ri.inst.constraint_op.matrix(), rho) < ri.inst.threshold) continue;
        ++sampled;
        CHECK(r.primal_value <= linalg::trace_product(ri.inst.objective.matrix(), rho) + 1e-8);
      }
      CHECK(sampled > 0);
    }
  }

  TEST_CASE("duality gap and witness on random instances") {
    std::mt19937_64 rng(51);
    for (int n = 0; n < 300; ++n) {
      const auto ri = random_instance(rng);
      const auto r = solve(ri.inst);
      REQUIRE(r.status == SdpStatus::optimal);
      CHECK(r.dual_value <= r.primal_value + 1e-12);
      CHECK(r.primal_value - r.dual_value <= 1e-7);
      REQUIRE(r.witness_state);
      const auto& w = *r.witness_state;
      CHECK(linalg::trace_product(ri.inst.constraint_op.matrix(), w.matrix()) >= ri.inst.threshold - 1e-8);
      CHECK(linalg::trace_product(ri.inst.objective.matrix(), w.matrix()) ==
            doctest::Approx(r.primal_value).epsilon(1e-8));
      CHECK(dual_function(ri.inst, r.dual_multiplier) == doctest::Approx(r.dual_value).epsilon(1e-12));
      // Rank of the witness: at most two eigenvalues above 1e-6.
      const auto es = linalg::eig_hermitian(w.as_operator());
      int rank = 0;
      for (double v : es.values) rank += v > 1e-6;
      CHECK(rank <= 2);
    }
  }

  TEST_CASE("agreement with the direct state search") {
    std::mt19937_64 rng(61);
    for (int n = 0; n < 40; ++n) {
      const auto ri = random_instance(rng);
      const auto r = solve(ri.inst);
      const oracle::StateSearch search(oracle::to_m4(ri.inst.objective.matrix()),
                                       oracle::to_m4(ri.inst.constraint_op.matrix()), ri.inst.threshold);
      const auto o = search.run(rng, 20);
      CHECK(std::abs(o.value - r.primal_value) <= 1e-4);
    }
  }

  TEST_CASE("value is nondecreasing in the threshold") {
    const bell::Theta th(kPi / 8);
    const bell::MeasurementAngles ang{0.5, 0.3};
    const auto inst = make_instance(
        pullback_objective(maps::alice_channel(th, ang.a, maps::axis_dephasing_params(ang.a)), maps::bob_channel(th, ang.b)),
        bell::bell_operator(th, ang), 0.0);
    const double top = linalg::eig_hermitian(inst.constraint_op).values[0];
    double prev = 2.0;
    for (double beta = top; beta > -top; beta -= 0.01) {
      SdpInstance i = inst;
      i.threshold = beta;
      const double v = solve(i).primal_value;
      CHECK(v <= prev + 1e-9);
      prev = v;
    }
  }

  TEST_CASE("threshold at the top of the spectrum") {
    std::mt19937_64 rng(71);
    for (int n = 0; n < 20; ++n) {
      auto ri = random_instance(rng);
      ri.inst.threshold = linalg::eig_hermitian(ri.inst.constraint_op).values[0];
      const auto r = solve(ri.inst);
      REQUIRE(r.status == SdpStatus::optimal);
      CHECK(r.primal_value - r.dual_value <= 1e-7);
      REQUIRE(r.witness_state);
      CHECK(linalg::trace_product(ri.inst.constraint_op.matrix(), r.witness_state->matrix()) >=
            ri.inst.threshold - 1e-8);
    }
  }
}
