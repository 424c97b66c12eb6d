#include "gchsh/bounds.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "gchsh/log.hpp"

namespace gchsh::bounds {

namespace {

constexpr double kScoreSlack = 1e-12;

}  // namespace

double slope(double score, double fidelity) {
  if (!(score < kQuantumBound)) throw DomainError("slope is undefined at or above 2 sqrt2");
  return (1.0 - fidelity) / (kQuantumBound - score);
}

double score_step(Theta theta, double kappa) {
  const double r = theta.value() / (kPi / 4.0);
  return r * r * kappa;
}

void check_supported(Theta theta) {
  const double t = theta.value();
  if (t < kThetaSupportedMin - 1e-12 || t > kThetaSupportedMax + 1e-12) {
    std::ostringstream os;
    os << "theta = " << t << " is outside the supported range [pi/64, pi/4]";
    throw InputError(os.str());
  }
}

ScoreSweep sweep_scores(const maps::AliceParamTable& alice, const SweepConfig& config, const SweepProgress& progress) {
  if (!(config.kappa > 0.0)) throw InputError("kappa must be positive");
  if (config.confirm_steps < 0) throw InputError("confirm_steps must be >= 0");
  if (config.max_steps < 1) throw InputError("max_steps must be >= 1");

  const Theta theta = alice.theta();
  ScoreSweep sweep;
  sweep.theta = theta;
  sweep.kappa = config.kappa;
  const double beta_local = bell::local_bound(theta);
  const double step = score_step(theta, config.kappa);

  std::optional<optim::AngleMinimum> previous;
  double best_slope = -1.0;
  bool dropped = false;
  for (int k = 0; k < config.max_steps; ++k) {
    const double score = beta_local - k * step;
    optim::AngleMinimum m = optim::certified_min(alice, score, previous, config.search);
    const SweepPoint p{score, m.fidelity};
    sweep.points.push_back(p);
    if (progress) progress(k, p);

    const double s = slope(score, p.min_fidelity);
    if (s > best_slope) {
      if (dropped) {
        std::ostringstream os;
        os << "slope rose again at score " << score << " (theta " << theta.value()
           << "); moving the inflection point";
        log_warning(os.str());
      }
      best_slope = s;
      sweep.inflection = static_cast<std::size_t>(k);
    } else {
      dropped = true;
    }
    if (k - static_cast<int>(sweep.inflection) >= 1 + config.confirm_steps) {
      sweep.inflection_found = true;
      break;
    }
    previous = std::move(m);
  }
  return sweep;
}

ScoreSweep sweep_scores(Theta theta, const SweepConfig& config, const SweepProgress& progress) {
  return sweep_scores(maps::AliceParamTable::build(theta, config.alice), config, progress);
}

BoundCurve trivial_score(const ScoreSweep& sweep) {
  if (!sweep.inflection_found || sweep.points.empty()) {
    std::ostringstream os;
    os << "no inflection point within " << sweep.points.size() << " sweep steps at theta " << sweep.theta.value();
    throw SweepIncompleteError(os.str());
  }
  const SweepPoint& star = sweep.points.at(sweep.inflection);
  BoundCurve c;
  c.theta = sweep.theta;
  c.beta_local = bell::local_bound(sweep.theta);
  c.beta_star = star.score;
  c.fidelity_star = star.min_fidelity;
  c.slope_star = slope(star.score, star.min_fidelity);
  c.beta_trivial = (0.5 - star.min_fidelity) / c.slope_star + star.score;
  c.kappa = sweep.kappa;
  c.sweep = sweep.points;
  return c;
}

double roof_line(const BoundCurve& curve, double beta) {
  return 1.0 - curve.slope_star * (kQuantumBound - beta);
}

double bound_at(const BoundCurve& curve, double beta) {
  if (beta > kQuantumBound + kScoreSlack) throw DomainError("score exceeds the quantum bound 2 sqrt2");
  beta = std::min(beta, kQuantumBound);
  if (beta <= curve.beta_trivial) return 0.5;
  return 0.5 * (1.0 + (beta - curve.beta_trivial) / (kQuantumBound - curve.beta_trivial));
}

BoundCurve compute_curve(const maps::AliceParamTable& alice, const SweepConfig& config, const SweepProgress& progress) {
  check_supported(alice.theta());
  BoundCurve c = trivial_score(sweep_scores(alice, config, progress));
  c.seed = config.search.seed;
  c.restarts = config.search.restarts;
  return c;
}

BoundCurve compute_curve(Theta theta, const SweepConfig& config, const SweepProgress& progress) {
  check_supported(theta);
  return compute_curve(maps::AliceParamTable::build(theta, config.alice), config, progress);
}

}  // namespace gchsh::bounds
