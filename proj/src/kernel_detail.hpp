// kernel_detail.hpp (private)
#pragma once

#include <cmath>
#include <stdexcept>

#include "phase_bandit/errors.hpp"
#include "phase_bandit/kernels.hpp"

namespace phase_bandit::kernels::detail {

// Contribution of design row g to the loss and (optionally) the gradient.
inline double row_loss(const GroupedDesign& d, Eigen::Index g, const Eigen::VectorXd& theta) {
  const double ip = d.actions.row(g).dot(theta);
  const double resid = d.means[g] - ip * ip;
  return 0.5 * (d.centered_ss[g] + d.counts[g] * resid * resid);
}

inline double row_loss_grad(const GroupedDesign& d, Eigen::Index g, const Eigen::VectorXd& theta,
                            Eigen::VectorXd& grad) {
  const double ip = d.actions.row(g).dot(theta);
  const double resid = d.means[g] - ip * ip;
  grad.noalias() -= (2.0 * d.counts[g] * resid * ip) * d.actions.row(g).transpose();
  return 0.5 * (d.centered_ss[g] + d.counts[g] * resid * resid);
}

inline void check_theta(const GroupedDesign& d, const Eigen::VectorXd& theta) {
  if (theta.size() != d.dim()) throw InvalidDimension("theta dimension does not match the design");
}

struct GridSpec {
  int dim;
  int points;
  double lo;
  double step;
  std::int64_t total;
};

inline GridSpec make_grid(const GroupedDesign& d, const FeasibleSet& f, int points) {
  if (d.dim() > 3) throw UnsupportedDimension("grid oracle supports d <= 3");
  if (points < 2) throw InvalidArgument("grid needs at least 2 points per axis");
  GridSpec g{d.dim(), points, -f.ball_radius, 2.0 * f.ball_radius / (points - 1), 1};
  for (int i = 0; i < g.dim; ++i) g.total *= points;
  return g;
}

inline void grid_point(const GridSpec& g, std::int64_t flat, Eigen::VectorXd& out) {
  for (int i = g.dim - 1; i >= 0; --i) {
    out[i] = g.lo + g.step * static_cast<double>(flat % g.points);
    flat /= g.points;
  }
}

// Feasibility for grid points: exact ball, half-space with a 1e-12 slack.
inline bool grid_feasible(const FeasibleSet& f, const Eigen::VectorXd& p) {
  if (p.squaredNorm() > f.ball_radius * f.ball_radius * (1.0 + 1e-12)) return false;
  if (f.half_space && f.half_space->direction.dot(p) < f.half_space->offset - 1e-12) return false;
  return true;
}

// Moment sums of one chunk; chunk c owns an independent stream.
MomentSums moment_chunk(int dim, double r, double sigma, std::int64_t count, RngState stream);

inline void accumulate(MomentSums& into, const MomentSums& part) {
  into.samples += part.samples;
  into.sum_y += part.sum_y;
  into.sum_y2 += part.sum_y2;
  into.sum_y4 += part.sum_y4;
  into.sum_x += part.sum_x;
  into.sum_x2 += part.sum_x2;
  into.sum_x3 += part.sum_x3;
  into.sum_x4 += part.sum_x4;
}

}  // namespace phase_bandit::kernels::detail
