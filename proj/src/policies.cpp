// policies.cpp
#include "phase_bandit/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace phase_bandit {

namespace {

std::int64_t ceil_length(double value) {
  if (!(value < 4e18)) return std::numeric_limits<std::int64_t>::max() / 2;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(value)));
}

Vector normalized_sum(const std::vector<Vector>& vs) {
  Vector s = vs.front();
  for (std::size_t i = 1; i < vs.size(); ++i) s += vs[i];
  return s / s.norm();
}

// Plays `action` up to `rounds` times; returns the number actually played.
std::int64_t play_repeated(BanditSession& session, const Action& action, std::int64_t rounds, Phase phase,
                           double* reward_sum = nullptr) {
  const std::int64_t k = std::min(rounds, session.remaining());
  double sum = 0.0;
  for (std::int64_t t = 0; t < k; ++t) sum += session.pull(action, phase);
  if (reward_sum) *reward_sum = sum;
  return k;
}

Action unit_action(const Vector& v) { return Action(v / v.norm()); }

}  // namespace

void WarmStartConfig::validate() const {
  if (horizon < 1) throw InvalidArgument("warm start horizon must be >= 1");
  if (!(radius > 0.0 && radius <= 1.0)) throw InvalidArgument("warm start radius must lie in (0, 1]");
  if (!(constant_scale > 0.0)) throw InvalidArgument("constant_scale must be > 0");
  solver.validate();
}

void EtcConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in (0, 1]");
  if (horizon < 1) throw InvalidArgument("ETC horizon must be >= 1");
  if (!(radius > 0.0 && radius <= 1.0)) throw InvalidArgument("ETC radius must lie in (0, 1]");
  if (!(constant_scale > 0.0)) throw InvalidArgument("constant_scale must be > 0");
  solver.validate();
}

std::int64_t warm_search_length(int dim, double radius, std::int64_t horizon, double scale) {
  const double tau2 = radius * radius / dim;
  const double n = static_cast<double>(horizon);
  return ceil_length(scale * 8.0 / (tau2 * tau2) * std::log(2.0 * n * n));
}

double warm_refine_beta(std::int64_t horizon) {
  return 9.0 * (std::log(98.0) + 4.0 * std::log(static_cast<double>(horizon)));
}

std::int64_t warm_refine_length(int dim, int k, double radius, std::int64_t horizon, double scale) {
  const double d = dim;
  const double r4 = std::pow(radius, 4);
  return ceil_length(scale * 64.0 * d * d * warm_refine_beta(horizon) / (k * r4));
}

std::int64_t etc_exploration_length(int dim, double radius, std::int64_t horizon, double scale) {
  const double n = static_cast<double>(horizon);
  return ceil_length(scale * 4.0 * dim * std::sqrt(n * std::log(n)) / (radius * radius));
}

double etc_mixing_weight(double alpha) { return std::min(0.5, std::sqrt(alpha) / 4.0); }

Action etc_exploration_action(const Action& warm, double lambda, std::int64_t j) {
  const int d = warm.dim();
  const auto k = static_cast<int>((j / 2) % d);
  Vector a = (1.0 - lambda) * warm.coords();
  a[k] += (j % 2 == 0 ? lambda : -lambda);
  return Action(std::move(a));
}

WarmOutput warm_start(BanditSession& session, const WarmStartConfig& cfg, Rng& rng) {
  cfg.validate();
  const int d = session.dim();
  const double r = cfg.radius;
  const double tau2 = r * r / d;
  const std::int64_t start_used = session.used();

  std::vector<Vector> basis;
  std::optional<Vector> last_v;
  auto finish = [&](bool halted) {
    Vector dir = basis.empty() ? (last_v ? *last_v : Vector(Vector::Unit(d, 0))) : normalized_sum(basis);
    return WarmOutput{Action(std::move(dir)), session.used() - start_used, halted, basis};
  };

  // First iteration: average a single random direction until it looks
  // aligned with theta*.
  const std::int64_t m1 = warm_search_length(d, r, cfg.horizon, cfg.constant_scale);
  double xbar = 0.0;
  for (;;) {
    if (session.remaining() == 0) return finish(false);
    const Action v = sample_unit_sphere(d, rng);
    last_v = v.coords();
    double sum = 0.0;
    if (play_repeated(session, v, m1, Phase::warm_search, &sum) < m1) return finish(false);
    xbar = sum / static_cast<double>(m1);
    if (xbar >= tau2) break;
  }
  basis.push_back(*last_v * std::sqrt(xbar));
  double energy = xbar;

  // Later iterations: probe a fresh orthogonal direction v alongside the
  // current estimate u and read <v, theta*> off a least squares fit.
  for (int k = 2; k <= d && energy < r * r / 16.0; ++k) {
    const std::int64_t m = warm_refine_length(d, k, r, cfg.horizon, cfg.constant_scale);
    const Vector u = normalized_sum(basis);
    const Action u_action(u);
    double projection = 0.0;
    for (;;) {
      if (session.remaining() == 0) return finish(false);
      const Vector v = sample_sphere_orthogonal(d, basis, rng).coords();
      last_v = v;
      const std::size_t begin = session.trajectory().size();
      const Action plus((u + v) / std::sqrt(2.0));
      const Action minus((u - v) / std::sqrt(2.0));
      if (play_repeated(session, plus, m, Phase::warm_refine) < m) return finish(false);
      if (play_repeated(session, minus, m, Phase::warm_refine) < m) return finish(false);
      if (play_repeated(session, u_action, m, Phase::warm_refine) < m) return finish(false);

      const auto problem = EstimatorProblem::from_trajectory(session.trajectory(), begin,
                                                             session.trajectory().size(), FeasibleSet{1.0, {}});
      const Vector theta_hat = constrained_least_squares(problem, cfg.solver, rng);
      projection = v.dot(theta_hat);
      if (projection * projection >= tau2) break;
    }
    basis.push_back(projection * *last_v);
    energy += projection * projection;
  }
  return finish(true);
}

EtcOutput explore_then_commit(BanditSession& session, const Action& warm_action, const EtcConfig& cfg, Rng& rng) {
  cfg.validate();
  if (warm_action.dim() != session.dim()) throw InvalidDimension("warm action dimension mismatch");
  if (warm_action.norm() == 0.0) throw InvalidArgument("warm action must be nonzero");
  const int d = session.dim();
  EtcOutput out;

  const std::int64_t m = etc_exploration_length(d, cfg.radius, cfg.horizon, cfg.constant_scale);
  if (m >= session.remaining()) {
    play_repeated(session, warm_action, session.remaining(), Phase::commit);
    out.committed = warm_action;
    out.skipped_exploration = true;
    return out;
  }

  const double lambda = etc_mixing_weight(cfg.alpha);
  const std::size_t begin = session.trajectory().size();
  for (std::int64_t j = 0; j < m; ++j) {
    session.pull(etc_exploration_action(warm_action, lambda, j % (2 * d)), Phase::etc_explore);
  }
  out.exploration_rounds = m;

  const Vector direction = warm_action.coords() / warm_action.norm();
  FeasibleSet feasible{cfg.radius, HalfSpace{direction, cfg.radius * std::sqrt(cfg.alpha)}};
  const auto problem =
      EstimatorProblem::from_trajectory(session.trajectory(), begin, session.trajectory().size(), feasible);
  SolverConfig solver = cfg.solver;
  const Vector theta_hat = constrained_least_squares(problem, solver, rng);

  if (theta_hat.norm() == 0.0) {
    out.degenerate_estimate = true;
    out.committed = warm_action;
  } else {
    out.committed = unit_action(theta_hat);
  }
  play_repeated(session, *out.committed, session.remaining(), Phase::commit);
  return out;
}

PolicyOutcome warm_start_run(const Environment& env, const WarmStartConfig& cfg, RngState rng_state) {
  Rng rng(rng_state);
  BanditSession session(env, cfg.horizon, rng.child(1));
  Rng policy_rng = rng.split(2);
  WarmOutput warm = warm_start(session, cfg, policy_rng);
  PolicyOutcome out{session.release(), std::nullopt, warm, {}};
  out.trajectory.prediction = warm.action;
  out.trajectory.warm_output = std::move(warm);
  return out;
}

PolicyOutcome etc_run(const Environment& env, const Action& warm_action, const EtcConfig& cfg,
                      std::int64_t remaining_budget, RngState rng_state) {
  Rng rng(rng_state);
  BanditSession session(env, remaining_budget, rng.child(1));
  Rng policy_rng = rng.split(2);
  PolicyOutcome out{Trajectory(env.dim()), std::nullopt, std::nullopt, {}};
  if (remaining_budget > 0) {
    EtcOutput etc = explore_then_commit(session, warm_action, cfg, policy_rng);
    out.committed_action = etc.committed;
    if (etc.degenerate_estimate) out.warnings.emplace_back("degenerate least squares estimate; committed to warm action");
  }
  out.trajectory = session.release();
  out.trajectory.prediction = out.committed_action;
  return out;
}

PolicyOutcome full_policy_run(const Environment& env, std::int64_t n, const WarmStartConfig& warm_cfg,
                              const EtcConfig& etc_cfg, RngState rng_state) {
  if (n < 1) throw InvalidArgument("horizon must be >= 1");
  Rng rng(rng_state);
  BanditSession session(env, n, rng.child(1));
  Rng policy_rng = rng.split(2);

  WarmStartConfig wcfg = warm_cfg;
  wcfg.horizon = n;
  EtcConfig ecfg = etc_cfg;
  ecfg.horizon = n;

  PolicyOutcome out{Trajectory(env.dim()), std::nullopt, std::nullopt, {}};
  WarmOutput warm = warm_start(session, wcfg, policy_rng);
  if (session.remaining() > 0) {
    EtcOutput etc = explore_then_commit(session, warm.action, ecfg, policy_rng);
    out.committed_action = etc.committed;
    if (etc.degenerate_estimate) out.warnings.emplace_back("degenerate least squares estimate; committed to warm action");
  }
  out.warm = warm;
  out.trajectory = session.release();
  out.trajectory.prediction = out.committed_action;
  out.trajectory.warm_output = std::move(warm);
  return out;
}

std::int64_t radius_probe_budget(int dim, std::int64_t horizon, double scale) {
  const double n = static_cast<double>(horizon);
  const std::int64_t budget = ceil_length(scale * 64.0 * dim * dim * std::log(std::max(n, 2.0)));
  return std::min(budget, std::max<std::int64_t>(1, horizon / 4));
}

PolicyOutcome radius_probe_run(const Environment& env, std::int64_t n, const WarmStartConfig& warm_cfg,
                               const EtcConfig& etc_cfg, RngState rng_state) {
  if (n < 1) throw InvalidArgument("horizon must be >= 1");
  Rng rng(rng_state);
  BanditSession session(env, n, rng.child(1));
  Rng policy_rng = rng.split(2);

  const std::int64_t budget = radius_probe_budget(env.dim(), n, warm_cfg.constant_scale);
  const RadiusEstimate probe = estimate_radius_squared(session, budget, 0.05, env.noise_sigma(), policy_rng);
  const double r2 = std::max({probe.value - probe.half_width, probe.value / 4.0, 1e-4});
  const double radius = std::sqrt(std::min(r2, 1.0));

  PolicyOutcome out{Trajectory(env.dim()), std::nullopt, std::nullopt, {}};
  WarmStartConfig wcfg = warm_cfg;
  wcfg.horizon = n;
  wcfg.radius = radius;
  EtcConfig ecfg = etc_cfg;
  ecfg.horizon = n;
  ecfg.radius = radius;
  if (session.remaining() > 0) {
    WarmOutput warm = warm_start(session, wcfg, policy_rng);
    if (session.remaining() > 0) {
      EtcOutput etc = explore_then_commit(session, warm.action, ecfg, policy_rng);
      out.committed_action = etc.committed;
      if (etc.degenerate_estimate) out.warnings.emplace_back("degenerate least squares estimate; committed to warm action");
    }
    out.warm = warm;
    out.trajectory.warm_output = warm;
  }
  auto warm_output = out.trajectory.warm_output;
  out.trajectory = session.release();
  out.trajectory.warm_output = std::move(warm_output);
  out.trajectory.prediction = out.committed_action;
  return out;
}

PolicyOutcome uniform_pure_exploration_run(const Environment& env, std::int64_t n, RngState rng_state,
                                           PredictionMode mode, const SolverConfig& solver) {
  if (n < 1) throw InvalidArgument("horizon must be >= 1");
  Rng rng(rng_state);
  BanditSession session(env, n, rng.child(1));
  Rng policy_rng = rng.split(2);
  const int d = env.dim();
  for (std::int64_t t = 0; t < n; ++t) session.pull(sample_unit_sphere(d, policy_rng), Phase::uniform_explore);

  const auto problem =
      EstimatorProblem::from_trajectory(session.trajectory(), 0, session.trajectory().size(), FeasibleSet{1.0, {}});
  Vector estimate = mode == PredictionMode::spectral ? spectral_init(problem)
                                                     : constrained_least_squares(problem, solver, policy_rng);
  if (estimate.norm() == 0.0) estimate = session.trajectory().action(0);

  PolicyOutcome out{session.release(), std::nullopt, std::nullopt, {}};
  out.trajectory.prediction = unit_action(estimate);
  return out;
}

Action predict_from_trajectory(const Trajectory& traj, PredictMode mode, Rng& rng) {
  if (traj.empty()) throw InvalidArgument("cannot predict from an empty trajectory");
  if (mode == PredictMode::committed && traj.prediction) return *traj.prediction;
  const auto i = static_cast<std::size_t>(rng.uniform_index(traj.size()));
  return Action(Vector(traj.action(i)));
}

bool warm_succeeded(const Environment& env, const WarmOutput& warm) {
  const double r = env.radius();
  return env.mean_reward(warm.action) >= r * r / 64.0;
}

}  // namespace phase_bandit
