// estimator.hpp
//
// Constrained least squares for phase retrieval data:
//
//   minimize  L(theta) = 1/2 sum_t (X_t - <A_t, theta>^2)^2
//   over      theta in B_R  intersected with an optional half-space.
//
// The loss is non-convex and symmetric under theta -> -theta. The solver is
// projected gradient descent with backtracking, started from a spectral
// initialization and a few random feasible points.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "phase_bandit/core.hpp"
#include "phase_bandit/design.hpp"

namespace phase_bandit {

struct Datum {
  Action action;
  double reward;
};

class EstimatorProblem {
 public:
  // Throws InvalidProblem on empty data or mixed dimensions.
  EstimatorProblem(std::span<const Datum> data, FeasibleSet feasible);

  // Rounds [begin, end) of a trajectory.
  static EstimatorProblem from_trajectory(const Trajectory& traj, std::size_t begin, std::size_t end,
                                          FeasibleSet feasible);

  int dim() const { return design_.dim(); }
  std::int64_t observations() const { return observations_; }
  double mean_reward() const { return mean_reward_; }
  const GroupedDesign& design() const { return design_; }
  const FeasibleSet& feasible() const { return feasible_; }

 private:
  EstimatorProblem(GroupedDesign design, FeasibleSet feasible, std::int64_t observations, double mean_reward);

  GroupedDesign design_;
  FeasibleSet feasible_;
  std::int64_t observations_;
  double mean_reward_;
};

enum class InitMode { spectral, warm, random };

struct SolverConfig {
  int max_iters = 5000;
  double step_size = 0.1;
  double grad_tolerance = 1e-8;
  int restarts = 5;
  int max_halvings = 40;
  InitMode init_mode = InitMode::spectral;
  // Starting point for InitMode::warm; projected onto the feasible set.
  std::optional<Vector> warm_start;

  void validate() const;
};

double quartic_loss(const Vector& theta, const EstimatorProblem& problem);
Vector quartic_loss_gradient(const Vector& theta, const EstimatorProblem& problem);

// lambda * v with v the leading eigenvector of (1/N) sum X_t A_t A_t^T and
// lambda = clip(sqrt(max(0, d * mean X)), 0, R). Zero vector when that
// matrix vanishes.
Vector spectral_init(const EstimatorProblem& problem);

// Euclidean projection onto ball intersected with half-space (Dykstra).
Vector project_feasible(const Vector& theta, const FeasibleSet& feasible);

struct DescentResult {
  Vector theta;
  double loss = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> loss_trace;  // filled when requested
};

// Projected gradient descent from a single start point.
DescentResult projected_gradient_descent(const EstimatorProblem& problem, const Vector& start,
                                         const SolverConfig& config, bool record_trace = false);

struct SolveReport {
  Vector theta;
  double loss = 0.0;
  std::vector<double> start_losses;  // loss at each (projected) start point
  int best_restart = 0;
};

SolveReport constrained_least_squares_report(const EstimatorProblem& problem, const SolverConfig& config,
                                             Rng& rng);

inline Vector constrained_least_squares(const EstimatorProblem& problem, const SolverConfig& config,
                                        Rng& rng) {
  return constrained_least_squares_report(problem, config, rng).theta;
}

// Grid search validation oracle; d <= 3 only.
Vector brute_force_ls_oracle(const EstimatorProblem& problem, int grid_points_per_axis);

struct RadiusEstimate {
  double value = 0.0;  // estimate of |theta*|^2, clipped to [0, 1]
  // Half-width of a (1 - delta) interval from the Gaussian tail bound with the
  // unit-radius variance proxy 1 + 2(d-1)/(d^3 + 2d^2) scaled by sigma.
  double half_width = 0.0;
};

// Plays `budget` uniform sphere actions through the session and returns
// d * (mean reward) clipped to [0, 1].
RadiusEstimate estimate_radius_squared(BanditSession& session, std::int64_t budget, double delta,
                                       double noise_sigma, Rng& rng);

}  // namespace phase_bandit
