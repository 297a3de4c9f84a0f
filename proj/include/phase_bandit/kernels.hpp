// kernels.hpp
//
// Data-parallel inner loops. Each kernel has a plain serial reference in
// kernels::serial and an OpenMP version in kernels::omp. The OpenMP versions
// reduce over fixed-size blocks in a fixed order, so their results do not
// depend on the thread count.
#pragma once

#include <cstdint>

#include "phase_bandit/design.hpp"
#include "phase_bandit/rng.hpp"

namespace phase_bandit::kernels {

// Rows per reduction block in the OpenMP loss kernels.
inline constexpr std::size_t kLossBlock = 512;
// Samples per independent random stream in the Monte Carlo kernels.
inline constexpr std::int64_t kSampleChunk = 1 << 15;

struct GridArgmin {
  Eigen::VectorXd point;
  double loss = 0.0;
  std::int64_t feasible_points = 0;
};

// Raw power sums of Y = <A, theta>^2 and X = Y + sigma * Z, with A uniform
// on the unit sphere and |theta| = r.
struct MomentSums {
  std::int64_t samples = 0;
  double sum_y = 0.0, sum_y2 = 0.0;    // Y and Y^2 (Y^2 = <A,theta>^4)
  double sum_y4 = 0.0;                 // for the standard error of E[Y^2]
  double sum_x = 0.0, sum_x2 = 0.0, sum_x3 = 0.0, sum_x4 = 0.0;
};

namespace serial {

double quartic_loss(const GroupedDesign& design, const Eigen::VectorXd& theta);
double quartic_loss_and_gradient(const GroupedDesign& design, const Eigen::VectorXd& theta,
                                 Eigen::VectorXd& gradient);
// (1/N) sum_t X_t A_t A_t^T
Eigen::MatrixXd weighted_second_moment(const GroupedDesign& design);
// Exhaustive search on the cube [-R, R]^d restricted to the feasible set.
// Ties resolve to the lowest flat grid index.
GridArgmin grid_argmin(const GroupedDesign& design, const FeasibleSet& feasible, int points_per_axis);
MomentSums sphere_moment_sums(int dim, double r, double sigma, std::int64_t samples, RngState stream);

}  // namespace serial

namespace omp {

double quartic_loss(const GroupedDesign& design, const Eigen::VectorXd& theta);
double quartic_loss_and_gradient(const GroupedDesign& design, const Eigen::VectorXd& theta,
                                 Eigen::VectorXd& gradient);
Eigen::MatrixXd weighted_second_moment(const GroupedDesign& design);
GridArgmin grid_argmin(const GroupedDesign& design, const FeasibleSet& feasible, int points_per_axis);
MomentSums sphere_moment_sums(int dim, double r, double sigma, std::int64_t samples, RngState stream);

}  // namespace omp

}  // namespace phase_bandit::kernels
