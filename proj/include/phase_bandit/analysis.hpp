// analysis.hpp
//
// Closed-form quantities for uniformly distributed actions and parameters,
// concentration bounds, lower-bound radii, and Monte Carlo diagnostics.
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "phase_bandit/core.hpp"
#include "phase_bandit/estimator.hpp"

namespace phase_bandit {

// E <A, theta>^2 = r^2 / d for A uniform on the unit sphere, |theta| = r.
double sphere_moment2(int d, double r);
// E <A, theta>^4 = 3 r^4 / (d^2 + 2d).
double sphere_moment4(int d, double r);
// Var X for unit-norm theta and unit-variance noise: 1 + 2(d-1)/(d^3 + 2d^2).
double reward_variance_unit(int d);

// (r^4 / 2)(3 / (d^2 + 2d) - 1 / d^2), the second-order approximation of the
// per-round mutual information under a uniform prior.
double information_gain_approx(int d, double r);
double information_gain_bound(int d, double r);  // r^4 / d^2

// r^2 (1 - |a|^2 / d)
double expected_gap(double action_norm, int d, double r);
// expected_gap(1, d, r)^2 / information_gain_approx(d, r)
double information_ratio(int d, double r);

// 9 (log(1/delta) + k log(98 n))
double beta_bound(int k, std::int64_t n, double delta);
// 9 (1 + k log(98 n))
double beta_bound_expectation(int k, std::int64_t n);

// sum_t <A_t, theta_hat - theta*>^2 <A_t, theta_hat + theta*>^2
double concentration_statistic(std::span<const Datum> data, const Vector& theta_hat, const Vector& theta_star);

enum class LowerBoundKind { cumulative, simple };

// cumulative: r^2 = sqrt((d^2 + 2d) / (96 e n)); simple: r^2 = sqrt(d^3 / (32 n)).
// Throws InfeasibleRadius when r > 1.
double lower_bound_radius(int d, std::int64_t n, LowerBoundKind kind);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  std::vector<std::pair<double, double>> points;
};

// OLS of log y on log x.
ScalingFit fit_scaling_exponent(std::span<const std::pair<double, double>> points);

// Empirical P(<X, phi>^2 >= |phi|^2 / m) for X uniform on the unit sphere of
// an m-dimensional subspace V of R^d and phi a random nonzero vector of V.
double sphere_projection_probability_check(int d, int m, std::int64_t trials, Rng& rng);

// Curvature inequality <theta/|theta| - phi/|phi|, theta> <= 2 |theta - phi|^2 / |theta|.
double curvature_slack(const Vector& theta, const Vector& phi);  // rhs - lhs
std::int64_t curvature_violations(int d, std::int64_t pairs, Rng& rng);

// Gaussian tail bound for weighted means: with probability >= 1 - delta,
//   |(1/n) sum a_t Z_t| <= sqrt(2 sum a_t^2 log(2/delta)) / n.
double gaussian_tail_threshold(std::span<const double> weights, double delta);
// Fraction of `replications` draws of Z that violate the bound.
double gaussian_tail_violation_rate(std::span<const double> weights, double delta, std::int64_t replications,
                                    Rng& rng);

struct MomentEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

struct SphereMoments {
  MomentEstimate moment2;       // E <A, theta>^2
  MomentEstimate moment4;       // E <A, theta>^4
  MomentEstimate reward_mean;   // E X
  MomentEstimate reward_variance;
};

// Monte Carlo estimates (parallel kernel) with standard errors.
SphereMoments monte_carlo_moments(int d, double r, double sigma, std::int64_t samples, RngState stream);

}  // namespace phase_bandit
