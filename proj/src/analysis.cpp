// analysis.cpp
#include "phase_bandit/analysis.hpp"

#include <cmath>
#include <numbers>

#include "phase_bandit/kernels.hpp"

namespace phase_bandit {

namespace {

void require_dim(int d) {
  if (d < 1) throw InvalidDimension("d must be >= 1");
}

}  // namespace

double sphere_moment2(int d, double r) {
  require_dim(d);
  return r * r / d;
}

double sphere_moment4(int d, double r) {
  require_dim(d);
  const double dd = d;
  return 3.0 * std::pow(r, 4) / (dd * dd + 2.0 * dd);
}

double reward_variance_unit(int d) {
  require_dim(d);
  const double dd = d;
  return 1.0 + 2.0 * (dd - 1.0) / (dd * dd * dd + 2.0 * dd * dd);
}

double information_gain_approx(int d, double r) {
  require_dim(d);
  const double dd = d;
  const double value = 0.5 * std::pow(r, 4) * (3.0 / (dd * dd + 2.0 * dd) - 1.0 / (dd * dd));
  if (value > information_gain_bound(d, r)) throw ContractViolation("information gain exceeds r^4/d^2");
  return value;
}

double information_gain_bound(int d, double r) {
  require_dim(d);
  return std::pow(r, 4) / (static_cast<double>(d) * d);
}

double expected_gap(double action_norm, int d, double r) {
  require_dim(d);
  if (!(action_norm >= 0.0 && action_norm <= 1.0 + kBallTolerance)) {
    throw InvalidArgument("action norm must lie in [0, 1]");
  }
  return r * r * (1.0 - action_norm * action_norm / d);
}

double information_ratio(int d, double r) {
  if (d < 2) throw DegenerateRatio("information ratio needs d >= 2 (the gap vanishes at d = 1)");
  const double info = information_gain_approx(d, r);
  if (info == 0.0) throw DegenerateRatio("zero information gain");
  const double gap = expected_gap(1.0, d, r);
  return gap * gap / info;
}

double beta_bound(int k, std::int64_t n, double delta) {
  if (k < 1 || n < 1) throw InvalidArgument("beta_bound needs k >= 1 and n >= 1");
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidArgument("delta must lie in (0, 1]");
  return 9.0 * (std::log(1.0 / delta) + k * std::log(98.0 * static_cast<double>(n)));
}

double beta_bound_expectation(int k, std::int64_t n) {
  if (k < 1 || n < 1) throw InvalidArgument("beta_bound needs k >= 1 and n >= 1");
  return 9.0 * (1.0 + k * std::log(98.0 * static_cast<double>(n)));
}

double concentration_statistic(std::span<const Datum> data, const Vector& theta_hat, const Vector& theta_star) {
  if (theta_hat.size() != theta_star.size()) throw InvalidDimension("theta dimensions differ");
  const Vector diff = theta_hat - theta_star;
  const Vector sum = theta_hat + theta_star;
  double total = 0.0;
  for (const Datum& d : data) {
    if (d.action.dim() != diff.size()) throw InvalidDimension("action dimension mismatch");
    const double a = d.action.coords().dot(diff);
    const double b = d.action.coords().dot(sum);
    total += a * a * b * b;
  }
  return total;
}

double lower_bound_radius(int d, std::int64_t n, LowerBoundKind kind) {
  require_dim(d);
  if (n < 1) throw InvalidArgument("n must be >= 1");
  const double dd = d;
  const double nn = static_cast<double>(n);
  const double r2 = kind == LowerBoundKind::cumulative
                        ? std::sqrt((dd * dd + 2.0 * dd) / (96.0 * std::numbers::e * nn))
                        : std::sqrt(dd * dd * dd / (32.0 * nn));
  if (r2 > 1.0) {
    throw InfeasibleRadius("lower-bound radius^2 = " + std::to_string(r2) + " exceeds 1 for d = " +
                           std::to_string(d) + ", n = " + std::to_string(n));
  }
  return std::sqrt(r2);
}

ScalingFit fit_scaling_exponent(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw InvalidArgument("scaling fit needs at least 2 points");
  ScalingFit fit;
  fit.points.assign(points.begin(), points.end());
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0 && y > 0.0)) throw InvalidArgument("scaling fit needs positive coordinates");
    mx += std::log(x);
    my += std::log(y);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  if (sxx == 0.0) throw InvalidArgument("scaling fit needs at least two distinct x values");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (const auto& [x, y] : points) {
    const double e = std::log(y) - (fit.intercept + fit.slope * std::log(x));
    ss += e * e;
  }
  fit.residual_rms = std::sqrt(ss / n);
  return fit;
}

double sphere_projection_probability_check(int d, int m, std::int64_t trials, Rng& rng) {
  if (m < 1 || m > d) throw InvalidArgument("subspace dimension must satisfy 1 <= m <= d");
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  // V = span(e_1, ..., e_m); X is drawn from the complement of the remaining
  // coordinate axes.
  std::vector<Vector> complement;
  for (int k = m; k < d; ++k) complement.push_back(Vector::Unit(d, k));
  std::int64_t hits = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    Vector phi = Vector::Zero(d);
    for (int k = 0; k < m; ++k) phi[k] = rng.normal();
    phi *= 0.1 + rng.uniform();
    const Vector x = sample_sphere_orthogonal(d, complement, rng).coords();
    const double ip = x.dot(phi);
    if (ip * ip >= phi.squaredNorm() / m) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

double curvature_slack(const Vector& theta, const Vector& phi) {
  const double nt = theta.norm();
  const double np = phi.norm();
  if (nt == 0.0 || np == 0.0) throw InvalidArgument("curvature inequality needs nonzero vectors");
  const double lhs = (theta / nt - phi / np).dot(theta);
  const double rhs = 2.0 / nt * (theta - phi).squaredNorm();
  return rhs - lhs;
}

std::int64_t curvature_violations(int d, std::int64_t pairs, Rng& rng) {
  std::int64_t violations = 0;
  for (std::int64_t i = 0; i < pairs; ++i) {
    const Vector theta = std::pow(rng.uniform(), 1.0 / d) * sample_unit_sphere(d, rng).coords();
    const Vector phi = std::pow(rng.uniform(), 1.0 / d) * sample_unit_sphere(d, rng).coords();
    if (theta.norm() == 0.0 || phi.norm() == 0.0) continue;
    // Relative slack absorbs rounding when both sides are tiny.
    const double scale = 1e-12 * (1.0 + theta.norm());
    if (curvature_slack(theta, phi) < -scale) ++violations;
  }
  return violations;
}

double gaussian_tail_threshold(std::span<const double> weights, double delta) {
  if (weights.empty()) throw InvalidArgument("need at least one weight");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  double s = 0.0;
  for (double a : weights) s += a * a;
  return std::sqrt(2.0 * s * std::log(2.0 / delta)) / static_cast<double>(weights.size());
}

double gaussian_tail_violation_rate(std::span<const double> weights, double delta, std::int64_t replications,
                                    Rng& rng) {
  const double threshold = gaussian_tail_threshold(weights, delta);
  const double n = static_cast<double>(weights.size());
  std::int64_t violations = 0;
  for (std::int64_t rep = 0; rep < replications; ++rep) {
    double s = 0.0;
    for (double a : weights) s += a * rng.normal();
    if (std::abs(s / n) >= threshold) ++violations;
  }
  return static_cast<double>(violations) / static_cast<double>(replications);
}

SphereMoments monte_carlo_moments(int d, double r, double sigma, std::int64_t samples, RngState stream) {
  if (samples < 2) throw InvalidArgument("need at least 2 samples");
  const auto s = kernels::omp::sphere_moment_sums(d, r, sigma, samples, stream);
  const double n = static_cast<double>(s.samples);
  SphereMoments out;

  const double m_y = s.sum_y / n;
  const double m_y2 = s.sum_y2 / n;
  const double m_y4 = s.sum_y4 / n;
  out.moment2 = {m_y, std::sqrt(std::max(0.0, m_y2 - m_y * m_y) / n)};
  out.moment4 = {m_y2, std::sqrt(std::max(0.0, m_y4 - m_y2 * m_y2) / n)};

  const double m1 = s.sum_x / n;
  const double m2 = s.sum_x2 / n;
  const double m3 = s.sum_x3 / n;
  const double m4 = s.sum_x4 / n;
  const double var = m2 - m1 * m1;
  out.reward_mean = {m1, std::sqrt(std::max(0.0, var) / n)};
  // Central fourth moment; SE(var) ~ sqrt((mu4 - var^2) / n).
  const double mu4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1;
  out.reward_variance = {var * n / (n - 1.0), std::sqrt(std::max(0.0, mu4 - var * var) / n)};
  return out;
}

}  // namespace phase_bandit
