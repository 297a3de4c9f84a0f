// core.hpp
//
// Environment, action geometry and regret accounting for bandit phase
// retrieval: the learner plays A_t in the closed unit ball and observes
// X_t = <A_t, theta*>^2 + sigma * eta_t with eta_t standard Gaussian.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "phase_bandit/errors.hpp"
#include "phase_bandit/rng.hpp"

namespace phase_bandit {

using Vector = Eigen::VectorXd;

// Slack on unit-ball membership; absorbs drift from normalizations such as
// (u +- v) / sqrt(2).
inline constexpr double kBallTolerance = 1e-12;

// A point of the closed unit ball. Construction checks membership.
class Action {
 public:
  explicit Action(Vector coords);

  const Vector& coords() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()); }
  double norm() const { return coords_.norm(); }

  Action operator-() const { return Action(-coords_); }

 private:
  Vector coords_;
};

class Environment {
 public:
  // r is taken to be |theta_star|, which must not exceed 1.
  explicit Environment(Vector theta_star, double noise_sigma = 1.0);

  // theta* uniform on the sphere of radius r.
  static Environment on_sphere(int dim, double r, Rng& rng, double noise_sigma = 1.0);

  int dim() const { return static_cast<int>(theta_star_.size()); }
  double radius() const { return radius_; }
  double noise_sigma() const { return noise_sigma_; }
  const Vector& theta_star() const { return theta_star_; }

  double mean_reward(const Action& action) const;

 private:
  Vector theta_star_;
  double radius_;
  double noise_sigma_;
};

Action sample_unit_sphere(int dim, Rng& rng);

// Uniform unit vector in span(basis)^perp. Basis vectors must be nonzero and
// mutually orthogonal; they need not be normalized.
Action sample_sphere_orthogonal(int dim, std::span<const Vector> basis, Rng& rng);

double reward(const Environment& env, const Action& action, Rng& rng);
double instant_regret(const Environment& env, const Action& action);
double simple_regret(const Environment& env, const Action& prediction);

enum class Phase : std::uint8_t {
  radius_probe,
  warm_search,   // first warm-start iteration: single direction, averaged
  warm_refine,   // later warm-start iterations: three-action probes
  etc_explore,
  commit,
  uniform_explore,
};

std::string_view to_string(Phase phase);

struct WarmOutput {
  Action action;
  std::int64_t rounds = 0;
  // True when the procedure reached its own stopping rule before the budget
  // ran out.
  bool halted = false;
  // The signed directions accumulated during the run, in insertion order.
  std::vector<Vector> basis;
};

// Log of one run. Round indices are implicit (step i is round i + 1).
class Trajectory {
 public:
  explicit Trajectory(int dim);

  void append(const Action& action, double reward, Phase phase);

  int dim() const { return dim_; }
  std::size_t size() const { return rewards_.size(); }
  bool empty() const { return rewards_.empty(); }

  std::int64_t round(std::size_t i) const { return static_cast<std::int64_t>(i) + 1; }
  Eigen::Map<const Vector> action(std::size_t i) const;
  double reward(std::size_t i) const { return rewards_[i]; }
  Phase phase(std::size_t i) const { return phases_[i]; }

  std::optional<Action> prediction;
  std::optional<WarmOutput> warm_output;

 private:
  int dim_;
  std::vector<double> coords_;
  std::vector<double> rewards_;
  std::vector<Phase> phases_;
};

double cumulative_regret(const Environment& env, const Trajectory& traj);

// The only handle a policy gets on the environment: it can submit actions
// and read rewards, never theta*. Every pull is counted against the horizon.
class BanditSession {
 public:
  BanditSession(const Environment& env, std::int64_t horizon, RngState noise_stream);

  int dim() const { return env_->dim(); }
  std::int64_t horizon() const { return horizon_; }
  std::int64_t used() const { return static_cast<std::int64_t>(trajectory_.size()); }
  std::int64_t remaining() const { return horizon_ - used(); }
  std::int64_t calls() const { return calls_; }

  // Throws BudgetExhausted once the horizon is reached.
  double pull(const Action& action, Phase phase);

  const Trajectory& trajectory() const { return trajectory_; }
  Trajectory& trajectory() { return trajectory_; }
  Trajectory release() { return std::move(trajectory_); }

 private:
  const Environment* env_;
  std::int64_t horizon_;
  std::int64_t calls_ = 0;
  Rng noise_;
  Trajectory trajectory_;
};

}  // namespace phase_bandit
