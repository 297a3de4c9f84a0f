// kernels_omp.cpp
//
// OpenMP versions of the kernels. Partial results are stored per block and
// combined serially in block order.
#include <omp.h>

#include <limits>
#include <vector>

#include "kernel_detail.hpp"

namespace phase_bandit::kernels::omp {

namespace {

std::ptrdiff_t block_count(std::size_t rows) {
  return static_cast<std::ptrdiff_t>((rows + kLossBlock - 1) / kLossBlock);
}

}  // namespace

double quartic_loss(const GroupedDesign& design, const Eigen::VectorXd& theta) {
  detail::check_theta(design, theta);
  const std::ptrdiff_t blocks = block_count(design.rows());
  const auto rows = static_cast<std::ptrdiff_t>(design.rows());
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::ptrdiff_t end = std::min<std::ptrdiff_t>(rows, (b + 1) * kLossBlock);
    double acc = 0.0;
    for (std::ptrdiff_t g = b * kLossBlock; g < end; ++g) acc += detail::row_loss(design, g, theta);
    partial[b] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double quartic_loss_and_gradient(const GroupedDesign& design, const Eigen::VectorXd& theta,
                                 Eigen::VectorXd& gradient) {
  detail::check_theta(design, theta);
  const std::ptrdiff_t blocks = block_count(design.rows());
  const auto rows = static_cast<std::ptrdiff_t>(design.rows());
  const int dim = design.dim();
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
  Eigen::MatrixXd partial_grad = Eigen::MatrixXd::Zero(dim, blocks);
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::ptrdiff_t end = std::min<std::ptrdiff_t>(rows, (b + 1) * kLossBlock);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim);
    double acc = 0.0;
    for (std::ptrdiff_t g = b * kLossBlock; g < end; ++g) acc += detail::row_loss_grad(design, g, theta, grad);
    partial[b] = acc;
    partial_grad.col(b) = grad;
  }
  gradient = Eigen::VectorXd::Zero(dim);
  double total = 0.0;
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    total += partial[b];
    gradient += partial_grad.col(b);
  }
  return total;
}

Eigen::MatrixXd weighted_second_moment(const GroupedDesign& design) {
  const std::ptrdiff_t blocks = block_count(design.rows());
  const auto rows = static_cast<std::ptrdiff_t>(design.rows());
  const int dim = design.dim();
  std::vector<Eigen::MatrixXd> partial(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::ptrdiff_t end = std::min<std::ptrdiff_t>(rows, (b + 1) * kLossBlock);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (std::ptrdiff_t g = b * kLossBlock; g < end; ++g) {
      const Eigen::VectorXd a = design.actions.row(g).transpose();
      m.noalias() += (design.counts[g] * design.means[g]) * a * a.transpose();
    }
    partial[b] = std::move(m);
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& p : partial) m += p;
  const double n = design.counts.sum();
  return n > 0 ? Eigen::MatrixXd(m / n) : m;
}

GridArgmin grid_argmin(const GroupedDesign& design, const FeasibleSet& feasible, int points_per_axis) {
  const auto grid = detail::make_grid(design, feasible, points_per_axis);
  const int threads = omp_get_max_threads();
  std::vector<double> best_loss(threads, std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> best_index(threads, -1);
  std::vector<std::int64_t> feasible_count(threads, 0);
#pragma omp parallel num_threads(threads)
  {
    const int tid = omp_get_thread_num();
    Eigen::VectorXd p(grid.dim);
    double local_best = std::numeric_limits<double>::infinity();
    std::int64_t local_index = -1;
    std::int64_t local_count = 0;
#pragma omp for schedule(static)
    for (std::int64_t flat = 0; flat < grid.total; ++flat) {
      detail::grid_point(grid, flat, p);
      if (!detail::grid_feasible(feasible, p)) continue;
      ++local_count;
      double loss = 0.0;
      for (Eigen::Index g = 0; g < design.actions.rows(); ++g) loss += detail::row_loss(design, g, p);
      if (loss < local_best) {
        local_best = loss;
        local_index = flat;
      }
    }
    best_loss[tid] = local_best;
    best_index[tid] = local_index;
    feasible_count[tid] = local_count;
  }
  GridArgmin best;
  best.loss = std::numeric_limits<double>::infinity();
  std::int64_t index = -1;
  for (int t = 0; t < threads; ++t) {
    best.feasible_points += feasible_count[t];
    if (best_index[t] < 0) continue;
    if (best_loss[t] < best.loss || (best_loss[t] == best.loss && best_index[t] < index)) {
      best.loss = best_loss[t];
      index = best_index[t];
    }
  }
  if (index < 0) throw InvalidProblem("no grid point lies in the feasible set");
  best.point.resize(grid.dim);
  detail::grid_point(grid, index, best.point);
  return best;
}

MomentSums sphere_moment_sums(int dim, double r, double sigma, std::int64_t samples, RngState stream) {
  if (dim < 1) throw InvalidDimension("dim must be >= 1");
  const std::int64_t chunks = (samples + kSampleChunk - 1) / kSampleChunk;
  std::vector<MomentSums> partial(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(dynamic, 1) if (chunks > 1)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::int64_t count = std::min(kSampleChunk, samples - c * kSampleChunk);
    const RngState s{stream.seed, stream_key({stream.stream, static_cast<std::uint64_t>(c)})};
    partial[c] = detail::moment_chunk(dim, r, sigma, count, s);
  }
  MomentSums total;
  for (const auto& p : partial) detail::accumulate(total, p);
  return total;
}

}  // namespace phase_bandit::kernels::omp
