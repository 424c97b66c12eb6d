#include "gchsh/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "gchsh/log.hpp"
#include "gchsh/nelder_mead.hpp"
#include "gchsh/sdp.hpp"

namespace gchsh::optim {

namespace {

constexpr double kMonotoneTol = 1e-9;
constexpr int kMaxEscalations = 3;
constexpr int kFeasibleRedraws = 20;

bool score_reachable(Theta theta, const MeasurementAngles& angles, double score) {
  const auto es = linalg::eig_hermitian(bell::bell_operator(theta, angles));
  return score <= es.values[0] + kTol.feasibility;
}

}  // namespace

double guidance_potential(Theta theta, const MeasurementAngles& angles) {
  const double da = angles.a - kPi / 4.0;
  const double db = angles.b - theta.value();
  return 1.0 + da * da + db * db;
}

AngleEvaluation evaluate_angles(const maps::AliceParamTable& alice, double score, const MeasurementAngles& angles) {
  const Theta theta = alice.theta();
  const auto bell_op = bell::bell_operator(theta, angles);
  const sdp::SdpInstance probe{linalg::Herm4{}, bell_op, score};
  if (!sdp::feasible(probe)) return {false, guidance_potential(theta, angles)};

  const auto lambda_a = maps::alice_channel(theta, angles.a, alice.params_at(angles.a));
  const auto lambda_b = maps::bob_channel(theta, angles.b);
  const sdp::SdpInstance inst{sdp::pullback_objective(lambda_a, lambda_b), bell_op, score};
  const sdp::SdpResult r = sdp::solve(inst);
  if (r.status != sdp::SdpStatus::optimal) return {false, guidance_potential(theta, angles)};
  return {true, r.primal_value};
}

AngleMinimum min_fidelity_over_angles(const maps::AliceParamTable& alice, double score,
                                      const AngleSearchConfig& config) {
  if (config.restarts < 1) throw InputError("restarts must be >= 1");
  if (score > kQuantumBound + kTol.feasibility)
    throw DomainError("score exceeds the quantum bound 2 sqrt2");
  const Theta theta = alice.theta();
  const double half = kPi / 2.0;

  std::vector<MeasurementAngles> starts{
      {kPi / 4.0, theta.value()}, {0.0, 0.0}, {0.0, half}, {half, 0.0}, {half, half}};
  starts.resize(std::min<std::size_t>(starts.size(), static_cast<std::size_t>(config.restarts)));
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> uniform(0.0, half);
  while (starts.size() < static_cast<std::size_t>(config.restarts)) {
    MeasurementAngles s{uniform(rng), uniform(rng)};
    for (int r = 0; r < kFeasibleRedraws && !score_reachable(theta, s, score); ++r) s = {uniform(rng), uniform(rng)};
    starts.push_back(s);
  }

  NelderMeadOptions<2> nm;
  nm.f_tol = config.local_tol;
  nm.x_tol = config.local_tol;
  nm.max_iters = config.max_iters;
  nm.initial_step = config.initial_step;
  nm.box = Box<2>{{0.0, 0.0}, {half, half}};

  AngleMinimum best;
  best.score = score;
  best.fidelity = std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    double run_best = std::numeric_limits<double>::infinity();
    MeasurementAngles run_angles = start;
    auto objective = [&](const Point<2>& x) {
      const MeasurementAngles ang{x[0], x[1]};
      const AngleEvaluation e = evaluate_angles(alice, score, ang);
      if (e.feasible && e.value < run_best) {
        run_best = e.value;
        run_angles = ang;
      }
      return e.value;
    };
    nelder_mead<2>(objective, {start.a, start.b}, nm);
    if (!std::isfinite(run_best)) continue;
    best.all_restart_values.push_back(run_best);
    if (run_best < best.fidelity) {
      best.fidelity = run_best;
      best.angles = run_angles;
    }
  }
  if (best.all_restart_values.empty()) {
    std::ostringstream os;
    os << "no measurement angles reach score " << score << " at theta " << theta.value();
    throw InfeasibleScoreError(os.str());
  }
  best.fidelity = std::clamp(best.fidelity, 0.0, 1.0);
  return best;
}

AngleMinimum min_fidelity_over_angles(Theta theta, double score, const AngleSearchConfig& config) {
  return min_fidelity_over_angles(maps::AliceParamTable::build(theta), score, config);
}

AngleMinimum certified_min(const maps::AliceParamTable& alice, double score, const std::optional<AngleMinimum>& previous,
                           const AngleSearchConfig& config) {
  if (previous && !(score < previous->score))
    throw InputError("certified_min expects a score below the previous step's score");
  AngleMinimum current = min_fidelity_over_angles(alice, score, config);
  if (!previous) return current;

  AngleSearchConfig escalated = config;
  int escalations = 0;
  while (current.fidelity > previous->fidelity + kMonotoneTol && escalations < kMaxEscalations) {
    ++escalations;
    escalated.restarts *= 2;
    AngleMinimum retry = min_fidelity_over_angles(alice, score, escalated);
    if (retry.fidelity <= current.fidelity) current = std::move(retry);
  }
  current.escalations = escalations;
  if (current.fidelity > previous->fidelity + kMonotoneTol) {
    std::ostringstream os;
    os << "minimum fidelity " << current.fidelity << " at score " << score << " exceeds " << previous->fidelity
       << " found at the higher score " << previous->score << " after " << escalations
       << " escalations; recording the previous value";
    log_warning(os.str());
    current.fidelity = previous->fidelity;
    current.angles = previous->angles;
    current.envelope_applied = true;
  }
  return current;
}

AngleMinimum certified_min(Theta theta, double score, const std::optional<AngleMinimum>& previous,
                           const AngleSearchConfig& config) {
  return certified_min(maps::AliceParamTable::build(theta), score, previous, config);
}

}  // namespace gchsh::optim
