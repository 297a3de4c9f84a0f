// design.hpp
//
// Data layout shared by the estimator and the numeric kernels.
#pragma once

#include <cstddef>
#include <optional>

#include <Eigen/Dense>

namespace phase_bandit {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Observations grouped by distinct action. For each row g the quartic loss
// contribution is
//   sum_t (X_t - q)^2 = centered_ss[g] + count[g] * (mean[g] - q)^2,
// with q = <A_g, theta>^2, so repeated plays cost one row.
struct GroupedDesign {
  RowMatrix actions;          // rows x dim
  Eigen::VectorXd counts;
  Eigen::VectorXd means;
  Eigen::VectorXd centered_ss;

  std::size_t rows() const { return static_cast<std::size_t>(actions.rows()); }
  int dim() const { return static_cast<int>(actions.cols()); }
};

struct HalfSpace {
  Eigen::VectorXd direction;  // unit
  double offset = 0.0;        // feasible: <direction, theta> >= offset
};

struct FeasibleSet {
  double ball_radius = 1.0;
  std::optional<HalfSpace> half_space;

  bool contains(const Eigen::VectorXd& theta, double tol = 1e-9) const {
    if (theta.norm() > ball_radius + tol) return false;
    if (half_space && half_space->direction.dot(theta) < half_space->offset - tol) return false;
    return true;
  }
};

}  // namespace phase_bandit
