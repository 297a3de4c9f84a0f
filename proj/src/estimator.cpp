// estimator.cpp
#include "phase_bandit/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "phase_bandit/kernels.hpp"

namespace phase_bandit {

namespace {

// Welford accumulation per distinct action, rows in first-seen order.
class DesignBuilder {
 public:
  explicit DesignBuilder(int dim) : dim_(dim) {}

  void add(const double* coords, double x) {
    std::vector<double> key(coords, coords + dim_);
    auto [it, inserted] = index_.try_emplace(std::move(key), rows_.size());
    if (inserted) rows_.push_back(Row{it->first, 0, 0.0, 0.0});
    Row& row = rows_[it->second];
    row.count += 1;
    const double delta = x - row.mean;
    row.mean += delta / static_cast<double>(row.count);
    row.m2 += delta * (x - row.mean);
    ++observations_;
    sum_ += x;
  }

  GroupedDesign build() const {
    GroupedDesign d;
    const auto n = static_cast<Eigen::Index>(rows_.size());
    d.actions.resize(n, dim_);
    d.counts.resize(n);
    d.means.resize(n);
    d.centered_ss.resize(n);
    for (Eigen::Index g = 0; g < n; ++g) {
      const Row& row = rows_[static_cast<std::size_t>(g)];
      for (int k = 0; k < dim_; ++k) d.actions(g, k) = row.coords[static_cast<std::size_t>(k)];
      d.counts[g] = static_cast<double>(row.count);
      d.means[g] = row.mean;
      d.centered_ss[g] = row.m2;
    }
    return d;
  }

  std::int64_t observations() const { return observations_; }
  double mean() const { return observations_ ? sum_ / static_cast<double>(observations_) : 0.0; }

 private:
  struct Row {
    std::vector<double> coords;
    std::int64_t count;
    double mean;
    double m2;
  };
  int dim_;
  std::map<std::vector<double>, std::size_t> index_;
  std::vector<Row> rows_;
  std::int64_t observations_ = 0;
  double sum_ = 0.0;
};

void validate_feasible(const FeasibleSet& f, int dim) {
  if (!(f.ball_radius > 0.0 && f.ball_radius <= 1.0)) throw InvalidProblem("ball_radius must lie in (0, 1]");
  if (f.half_space) {
    if (f.half_space->direction.size() != dim) throw InvalidProblem("half-space direction dimension mismatch");
    if (std::abs(f.half_space->direction.norm() - 1.0) > 1e-9) {
      throw InvalidProblem("half-space direction must be a unit vector");
    }
    if (f.half_space->offset > f.ball_radius) throw InvalidProblem("half-space misses the ball");
  }
}

Vector project_ball(const Vector& x, double radius) {
  const double n = x.norm();
  return n > radius ? Vector(x * (radius / n)) : x;
}

Vector project_half_space(const Vector& x, const HalfSpace& h) {
  const double gap = h.offset - h.direction.dot(x);
  return gap > 0.0 ? Vector(x + gap * h.direction) : x;
}

Vector random_feasible_point(int dim, const FeasibleSet& f, Rng& rng) {
  const Vector dir = sample_unit_sphere(dim, rng).coords();
  const double radius = f.ball_radius * std::pow(rng.uniform(), 1.0 / dim);
  return project_feasible(radius * dir, f);
}

// Symmetric loss: flip a start point into the half-space side when possible.
Vector orient(const Vector& theta, const FeasibleSet& f) {
  if (f.half_space && f.half_space->direction.dot(theta) < 0.0) return -theta;
  return theta;
}

}  // namespace

EstimatorProblem::EstimatorProblem(GroupedDesign design, FeasibleSet feasible, std::int64_t observations,
                                   double mean_reward)
    : design_(std::move(design)),
      feasible_(std::move(feasible)),
      observations_(observations),
      mean_reward_(mean_reward) {
  if (observations_ < 1) throw InvalidProblem("estimator needs at least one datum");
  validate_feasible(feasible_, design_.dim());
}

EstimatorProblem::EstimatorProblem(std::span<const Datum> data, FeasibleSet feasible)
    : EstimatorProblem([&] {
        if (data.empty()) throw InvalidProblem("estimator needs at least one datum");
        const int dim = data.front().action.dim();
        DesignBuilder b(dim);
        for (const Datum& d : data) {
          if (d.action.dim() != dim) throw InvalidProblem("mixed action dimensions");
          b.add(d.action.coords().data(), d.reward);
        }
        return EstimatorProblem(b.build(), std::move(feasible), b.observations(), b.mean());
      }()) {}

EstimatorProblem EstimatorProblem::from_trajectory(const Trajectory& traj, std::size_t begin, std::size_t end,
                                                   FeasibleSet feasible) {
  if (begin >= end || end > traj.size()) throw InvalidProblem("empty or out-of-range trajectory slice");
  DesignBuilder b(traj.dim());
  for (std::size_t i = begin; i < end; ++i) b.add(traj.action(i).data(), traj.reward(i));
  return EstimatorProblem(b.build(), std::move(feasible), b.observations(), b.mean());
}

void SolverConfig::validate() const {
  if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  if (!(step_size > 0.0)) throw InvalidArgument("step_size must be > 0");
  if (restarts < 1) throw InvalidArgument("restarts must be >= 1");
  if (max_halvings < 0) throw InvalidArgument("max_halvings must be >= 0");
  if (init_mode == InitMode::warm && !warm_start) throw InvalidArgument("warm init needs a start point");
}

double quartic_loss(const Vector& theta, const EstimatorProblem& problem) {
  return kernels::omp::quartic_loss(problem.design(), theta);
}

Vector quartic_loss_gradient(const Vector& theta, const EstimatorProblem& problem) {
  Vector g;
  kernels::omp::quartic_loss_and_gradient(problem.design(), theta, g);
  return g;
}

Vector spectral_init(const EstimatorProblem& problem) {
  const int dim = problem.dim();
  const Eigen::MatrixXd m = kernels::omp::weighted_second_moment(problem.design());
  if (m.cwiseAbs().maxCoeff() == 0.0) return Vector::Zero(dim);

  // Shift by a Gershgorin lower bound so the top algebraic eigenvalue
  // dominates the power iteration.
  double lower = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim; ++i) {
    lower = std::min(lower, m(i, i) - (m.row(i).cwiseAbs().sum() - std::abs(m(i, i))));
  }
  Eigen::MatrixXd shifted = m;
  if (lower < 0.0) shifted.diagonal().array() -= lower;

  Eigen::Index pivot = 0;
  shifted.diagonal().maxCoeff(&pivot);
  Vector v = shifted.col(pivot);
  if (v.norm() == 0.0) v = Vector::Ones(dim);
  v.normalize();
  for (int it = 0; it < 200; ++it) {
    Vector next = shifted * v;
    const double n = next.norm();
    if (n == 0.0) break;
    next /= n;
    const double change = (next - v).norm();
    v = std::move(next);
    if (change < 1e-10) break;
  }

  const double scale = std::sqrt(std::max(0.0, dim * problem.mean_reward()));
  return std::clamp(scale, 0.0, problem.feasible().ball_radius) * v;
}

Vector project_feasible(const Vector& theta, const FeasibleSet& feasible) {
  const double radius = feasible.ball_radius;
  if (!feasible.half_space) return project_ball(theta, radius);
  const HalfSpace& h = *feasible.half_space;

  if (feasible.contains(theta, 0.0)) return theta;
  // Only one constraint active: a single projection is exact.
  Vector onto_ball = project_ball(theta, radius);
  if (h.direction.dot(onto_ball) >= h.offset) return onto_ball;
  Vector onto_half = project_half_space(theta, h);
  if (onto_half.norm() <= radius) return onto_half;

  // Dykstra's alternating projections.
  Vector x = theta;
  Vector p = Vector::Zero(theta.size());
  Vector q = Vector::Zero(theta.size());
  for (int it = 0; it < 100; ++it) {
    const Vector y = project_ball(x + p, radius);
    p = x + p - y;
    Vector next = project_half_space(y + q, h);
    q = y + q - next;
    const double moved = (next - x).norm();
    x = std::move(next);
    if (moved < 1e-12) break;
  }
  return project_ball(x, radius);
}

DescentResult projected_gradient_descent(const EstimatorProblem& problem, const Vector& start,
                                         const SolverConfig& config, bool record_trace) {
  config.validate();
  const GroupedDesign& design = problem.design();
  const FeasibleSet& feasible = problem.feasible();

  DescentResult out;
  out.theta = project_feasible(start, feasible);
  Vector grad;
  out.loss = kernels::omp::quartic_loss_and_gradient(design, out.theta, grad);
  if (record_trace) out.loss_trace.push_back(out.loss);

  double step = config.step_size;
  for (int it = 0; it < config.max_iters; ++it) {
    Vector candidate;
    double candidate_loss = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int h = 0; h <= config.max_halvings; ++h) {
      candidate = project_feasible(out.theta - step * grad, feasible);
      candidate_loss = kernels::omp::quartic_loss(design, candidate);
      if (candidate_loss <= out.loss) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    out.iterations = it + 1;
    if (!accepted) {
      out.converged = true;
      break;
    }
    const double moved = (candidate - out.theta).norm();
    const double mapping_norm = moved / step;
    out.theta = std::move(candidate);
    out.loss = kernels::omp::quartic_loss_and_gradient(design, out.theta, grad);
    if (record_trace) out.loss_trace.push_back(out.loss);
    if (mapping_norm < config.grad_tolerance || moved == 0.0) {
      out.converged = true;
      break;
    }
    step *= 2.0;
  }
  return out;
}

SolveReport constrained_least_squares_report(const EstimatorProblem& problem, const SolverConfig& config,
                                             Rng& rng) {
  config.validate();
  const FeasibleSet& feasible = problem.feasible();
  const int dim = problem.dim();

  SolveReport report;
  report.loss = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < config.restarts; ++restart) {
    Vector start;
    if (restart == 0 && config.init_mode == InitMode::spectral) {
      start = spectral_init(problem);
      if (start.norm() == 0.0) start = random_feasible_point(dim, feasible, rng);
    } else if (restart == 0 && config.init_mode == InitMode::warm) {
      start = *config.warm_start;
      if (start.size() != dim) throw InvalidDimension("warm start dimension mismatch");
    } else {
      start = random_feasible_point(dim, feasible, rng);
    }
    start = project_feasible(orient(start, feasible), feasible);
    report.start_losses.push_back(quartic_loss(start, problem));

    DescentResult run = projected_gradient_descent(problem, start, config);
    if (run.loss < report.loss) {
      report.loss = run.loss;
      report.theta = std::move(run.theta);
      report.best_restart = restart;
    }
  }
  return report;
}

Vector brute_force_ls_oracle(const EstimatorProblem& problem, int grid_points_per_axis) {
  if (problem.dim() > 3) throw UnsupportedDimension("brute-force oracle supports d <= 3");
  if (grid_points_per_axis < 11) throw InvalidArgument("grid_points_per_axis must be >= 11");
  return kernels::omp::grid_argmin(problem.design(), problem.feasible(), grid_points_per_axis).point;
}

RadiusEstimate estimate_radius_squared(BanditSession& session, std::int64_t budget, double delta,
                                       double noise_sigma, Rng& rng) {
  if (budget < 1) throw InvalidArgument("radius probe budget must be >= 1");
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidArgument("delta must lie in (0, 1]");
  const int dim = session.dim();
  const std::int64_t rounds = std::min(budget, session.remaining());
  if (rounds < 1) throw BudgetExhausted("no rounds left for the radius probe");

  double sum = 0.0;
  for (std::int64_t t = 0; t < rounds; ++t) sum += session.pull(sample_unit_sphere(dim, rng), Phase::radius_probe);

  const double d = static_cast<double>(dim);
  RadiusEstimate est;
  est.value = std::clamp(d * sum / static_cast<double>(rounds), 0.0, 1.0);
  const double variance = noise_sigma * noise_sigma + 2.0 * (d - 1.0) / (d * d * d + 2.0 * d * d);
  est.half_width = d * std::sqrt(2.0 * variance * std::log(2.0 / delta) / static_cast<double>(rounds));
  return est;
}

}  // namespace phase_bandit
