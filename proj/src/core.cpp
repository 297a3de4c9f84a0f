// core.cpp
#include "phase_bandit/core.hpp"

#include <cmath>
#include <string>

namespace phase_bandit {

namespace {

void require_in_ball(const Vector& v) {
  const double norm = v.norm();
  if (!(norm <= 1.0 + kBallTolerance)) {
    throw ContractViolation("action norm " + std::to_string(norm) + " exceeds the unit ball");
  }
}

Vector gaussian_vector(int dim, Rng& rng) {
  Vector g(dim);
  for (int i = 0; i < dim; ++i) g[i] = rng.normal();
  return g;
}

}  // namespace

Action::Action(Vector coords) : coords_(std::move(coords)) { require_in_ball(coords_); }

Environment::Environment(Vector theta_star, double noise_sigma)
    : theta_star_(std::move(theta_star)),
      radius_(theta_star_.norm()),
      noise_sigma_(noise_sigma) {
  if (theta_star_.size() == 0) throw InvalidDimension("theta_star must have dim >= 1");
  if (radius_ > 1.0 + kBallTolerance) throw InvalidArgument("|theta_star| must be <= 1");
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("noise_sigma must be >= 0");
}

Environment Environment::on_sphere(int dim, double r, Rng& rng, double noise_sigma) {
  if (!(r >= 0.0 && r <= 1.0)) throw InvalidArgument("radius must lie in [0, 1]");
  return Environment(r * sample_unit_sphere(dim, rng).coords(), noise_sigma);
}

double Environment::mean_reward(const Action& action) const {
  if (action.dim() != dim()) throw InvalidDimension("action dimension mismatch");
  const double ip = action.coords().dot(theta_star_);
  return ip * ip;
}

Action sample_unit_sphere(int dim, Rng& rng) {
  if (dim < 1) throw InvalidDimension("sample_unit_sphere needs dim >= 1");
  Vector g = gaussian_vector(dim, rng);
  double norm = g.norm();
  while (norm == 0.0) {
    g = gaussian_vector(dim, rng);
    norm = g.norm();
  }
  return Action(g / norm);
}

Action sample_sphere_orthogonal(int dim, std::span<const Vector> basis, Rng& rng) {
  if (dim < 1) throw InvalidDimension("sample_sphere_orthogonal needs dim >= 1");
  if (basis.size() >= static_cast<std::size_t>(dim)) {
    throw EmptyComplement("basis of size " + std::to_string(basis.size()) +
                          " leaves no complement in dimension " + std::to_string(dim));
  }
  std::vector<Vector> unit;
  unit.reserve(basis.size());
  for (const Vector& b : basis) {
    if (b.size() != dim) throw InvalidDimension("basis vector dimension mismatch");
    const double n = b.norm();
    if (n == 0.0) throw InvalidBasis("zero basis vector");
    unit.push_back(b / n);
  }
  for (std::size_t i = 0; i < unit.size(); ++i) {
    for (std::size_t j = i + 1; j < unit.size(); ++j) {
      if (std::abs(unit[i].dot(unit[j])) >= 1e-9) throw InvalidBasis("basis is not orthogonal");
    }
  }

  for (;;) {
    Vector g = gaussian_vector(dim, rng);
    // Two Gram-Schmidt sweeps keep the residual orthogonal to 1e-15.
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (const Vector& e : unit) g -= g.dot(e) * e;
    }
    const double norm = g.norm();
    if (norm > 1e-8) return Action(g / norm);
  }
}

double reward(const Environment& env, const Action& action, Rng& rng) {
  require_in_ball(action.coords());
  const double noise = env.noise_sigma() == 0.0 ? 0.0 : env.noise_sigma() * rng.normal();
  return env.mean_reward(action) + noise;
}

double instant_regret(const Environment& env, const Action& action) {
  const double r = env.radius();
  return r * r - env.mean_reward(action);
}

double simple_regret(const Environment& env, const Action& prediction) {
  return instant_regret(env, prediction);
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::radius_probe: return "radius_probe";
    case Phase::warm_search: return "warm_search";
    case Phase::warm_refine: return "warm_refine";
    case Phase::etc_explore: return "etc_explore";
    case Phase::commit: return "commit";
    case Phase::uniform_explore: return "uniform_explore";
  }
  return "unknown";
}

Trajectory::Trajectory(int dim) : dim_(dim) {
  if (dim < 1) throw InvalidDimension("trajectory needs dim >= 1");
}

void Trajectory::append(const Action& action, double reward, Phase phase) {
  if (action.dim() != dim_) throw InvalidDimension("action dimension mismatch");
  coords_.insert(coords_.end(), action.coords().data(), action.coords().data() + dim_);
  rewards_.push_back(reward);
  phases_.push_back(phase);
}

Eigen::Map<const Vector> Trajectory::action(std::size_t i) const {
  return Eigen::Map<const Vector>(coords_.data() + i * static_cast<std::size_t>(dim_), dim_);
}

double cumulative_regret(const Environment& env, const Trajectory& traj) {
  const double r2 = env.radius() * env.radius();
  double total = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double ip = traj.action(i).dot(env.theta_star());
    total += r2 - ip * ip;
  }
  return total;
}

BanditSession::BanditSession(const Environment& env, std::int64_t horizon, RngState noise_stream)
    : env_(&env), horizon_(horizon), noise_(noise_stream), trajectory_(env.dim()) {
  if (horizon < 0) throw InvalidArgument("horizon must be >= 0");
}

double BanditSession::pull(const Action& action, Phase phase) {
  if (used() >= horizon_) throw BudgetExhausted("horizon of " + std::to_string(horizon_) + " reached");
  ++calls_;
  const double x = reward(*env_, action, noise_);
  trajectory_.append(action, x, phase);
  return x;
}

}  // namespace phase_bandit
