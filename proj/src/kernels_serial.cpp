// kernels_serial.cpp
//
// Straight-line reference versions of the kernels.
#include <limits>

#include "kernel_detail.hpp"

namespace phase_bandit::kernels {

namespace detail {

MomentSums moment_chunk(int dim, double r, double sigma, std::int64_t count, RngState stream) {
  Rng rng(stream);
  const double coord = r / std::sqrt(static_cast<double>(dim));
  MomentSums s;
  s.samples = count;
  Eigen::VectorXd g(dim);
  for (std::int64_t i = 0; i < count; ++i) {
    double norm2 = 0.0;
    do {
      for (int k = 0; k < dim; ++k) g[k] = rng.normal();
      norm2 = g.squaredNorm();
    } while (norm2 == 0.0);
    const double ip = coord * g.sum() / std::sqrt(norm2);
    const double y = ip * ip;
    const double x = y + sigma * rng.normal();
    const double y2 = y * y;
    const double x2 = x * x;
    s.sum_y += y;
    s.sum_y2 += y2;
    s.sum_y4 += y2 * y2;
    s.sum_x += x;
    s.sum_x2 += x2;
    s.sum_x3 += x2 * x;
    s.sum_x4 += x2 * x2;
  }
  return s;
}

}  // namespace detail

namespace serial {

double quartic_loss(const GroupedDesign& design, const Eigen::VectorXd& theta) {
  detail::check_theta(design, theta);
  double total = 0.0;
  for (Eigen::Index g = 0; g < design.actions.rows(); ++g) total += detail::row_loss(design, g, theta);
  return total;
}

double quartic_loss_and_gradient(const GroupedDesign& design, const Eigen::VectorXd& theta,
                                 Eigen::VectorXd& gradient) {
  detail::check_theta(design, theta);
  gradient = Eigen::VectorXd::Zero(design.dim());
  double total = 0.0;
  for (Eigen::Index g = 0; g < design.actions.rows(); ++g) {
    total += detail::row_loss_grad(design, g, theta, gradient);
  }
  return total;
}

Eigen::MatrixXd weighted_second_moment(const GroupedDesign& design) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(design.dim(), design.dim());
  const double n = design.counts.sum();
  for (Eigen::Index g = 0; g < design.actions.rows(); ++g) {
    const Eigen::VectorXd a = design.actions.row(g).transpose();
    m.noalias() += (design.counts[g] * design.means[g]) * a * a.transpose();
  }
  return n > 0 ? Eigen::MatrixXd(m / n) : m;
}

GridArgmin grid_argmin(const GroupedDesign& design, const FeasibleSet& feasible, int points_per_axis) {
  const auto grid = detail::make_grid(design, feasible, points_per_axis);
  GridArgmin best;
  best.loss = std::numeric_limits<double>::infinity();
  std::int64_t best_index = -1;
  Eigen::VectorXd p(grid.dim);
  for (std::int64_t flat = 0; flat < grid.total; ++flat) {
    detail::grid_point(grid, flat, p);
    if (!detail::grid_feasible(feasible, p)) continue;
    ++best.feasible_points;
    const double loss = quartic_loss(design, p);
    if (loss < best.loss) {
      best.loss = loss;
      best_index = flat;
    }
  }
  if (best_index < 0) throw InvalidProblem("no grid point lies in the feasible set");
  best.point.resize(grid.dim);
  detail::grid_point(grid, best_index, best.point);
  return best;
}

MomentSums sphere_moment_sums(int dim, double r, double sigma, std::int64_t samples, RngState stream) {
  if (dim < 1) throw InvalidDimension("dim must be >= 1");
  MomentSums total;
  const std::int64_t chunks = (samples + kSampleChunk - 1) / kSampleChunk;
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::int64_t count = std::min(kSampleChunk, samples - c * kSampleChunk);
    const RngState s{stream.seed, stream_key({stream.stream, static_cast<std::uint64_t>(c)})};
    detail::accumulate(total, detail::moment_chunk(dim, r, sigma, count, s));
  }
  return total;
}

}  // namespace serial

}  // namespace phase_bandit::kernels
