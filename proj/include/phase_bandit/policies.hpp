// policies.hpp
//
// Learning policies for bandit phase retrieval:
//
//  * warm_start      adaptive search for a constant-factor optimal action
//                    (|<A_w, theta*>|^2 >= r^2 / 64 w.h.p.), building an
//                    orthogonal set of signed directions.
//  * explore_then_commit
//                    given such an action, explore 2d perturbations of it,
//                    solve the half-space constrained least squares problem,
//                    and commit to the normalized estimate.
//  * full policy     the composition of the two.
//  * uniform pure exploration
//                    non-adaptive baseline: i.i.d. uniform actions followed
//                    by a least squares (or spectral) prediction.
//
// Policies see the environment only through BanditSession.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phase_bandit/core.hpp"
#include "phase_bandit/estimator.hpp"

namespace phase_bandit {

struct WarmStartConfig {
  std::int64_t horizon = 1;
  double radius = 1.0;
  double constant_scale = 1.0;  // multiplies every episode length
  SolverConfig solver{};

  void validate() const;
};

struct EtcConfig {
  double alpha = 1.0 / 64.0;
  double constant_scale = 1.0;
  std::int64_t horizon = 1;
  double radius = 1.0;
  SolverConfig solver{};

  void validate() const;
};

// Episode length of the first warm-start iteration: ceil(c * 8 / tau^4 * log(2 n^2)).
std::int64_t warm_search_length(int dim, double radius, std::int64_t horizon, double scale);
// Confidence width used by later warm-start iterations: 9 (log 98 + 4 log n).
double warm_refine_beta(std::int64_t horizon);
// Episode length of warm-start iteration k >= 2: ceil(c * 64 d^2 beta / (k r^4)).
std::int64_t warm_refine_length(int dim, int k, double radius, std::int64_t horizon, double scale);
// ETC exploration length ceil(c * 4 d sqrt(n log n) / r^2).
std::int64_t etc_exploration_length(int dim, double radius, std::int64_t horizon, double scale);
// Perturbation weight min(1/2, sqrt(alpha) / 4).
double etc_mixing_weight(double alpha);
// The j-th action of the 2d-cycle: (1 - lambda) A_w + s lambda e_k with
// k = j / 2 and s = +1 for even j, -1 for odd j.
Action etc_exploration_action(const Action& warm, double lambda, std::int64_t j);

// Runs the warm-start procedure on the session. Stops early when the budget
// runs out; the returned action is then the best available so far.
WarmOutput warm_start(BanditSession& session, const WarmStartConfig& cfg, Rng& rng);

struct EtcOutput {
  std::optional<Action> committed;
  std::int64_t exploration_rounds = 0;
  bool degenerate_estimate = false;
  bool skipped_exploration = false;  // m >= remaining: warm action replayed
};

EtcOutput explore_then_commit(BanditSession& session, const Action& warm_action, const EtcConfig& cfg, Rng& rng);

struct PolicyOutcome {
  Trajectory trajectory;
  std::optional<Action> committed_action;
  std::optional<WarmOutput> warm;
  std::vector<std::string> warnings;
};

PolicyOutcome warm_start_run(const Environment& env, const WarmStartConfig& cfg, RngState rng);

PolicyOutcome etc_run(const Environment& env, const Action& warm_action, const EtcConfig& cfg,
                      std::int64_t remaining_budget, RngState rng);

PolicyOutcome full_policy_run(const Environment& env, std::int64_t n, const WarmStartConfig& warm_cfg,
                              const EtcConfig& etc_cfg, RngState rng);

// Unknown-radius variant of the full policy: spends a short probe of uniform
// actions estimating |theta*|^2, then runs the full policy with a radius
// taken from the lower end of the probe's confidence interval.
std::int64_t radius_probe_budget(int dim, std::int64_t horizon, double scale);
PolicyOutcome radius_probe_run(const Environment& env, std::int64_t n, const WarmStartConfig& warm_cfg,
                               const EtcConfig& etc_cfg, RngState rng);

enum class PredictionMode { least_squares, spectral };

PolicyOutcome uniform_pure_exploration_run(const Environment& env, std::int64_t n, RngState rng,
                                           PredictionMode mode = PredictionMode::least_squares,
                                           const SolverConfig& solver = {});

enum class PredictMode { uniform_sample, committed };

// Final recommendation from a finished run: a uniformly drawn logged action,
// or the committed action when there is one.
Action predict_from_trajectory(const Trajectory& traj, PredictMode mode, Rng& rng);

// Ground-truth diagnostics; never consulted by the policies themselves.
bool warm_succeeded(const Environment& env, const WarmOutput& warm);

}  // namespace phase_bandit
