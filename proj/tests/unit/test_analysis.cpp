#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "phase_bandit/analysis.hpp"

using namespace phase_bandit;

TEST_SUITE("closed forms") {
  TEST_CASE("second moment") {
    CHECK(sphere_moment2(1, 1.0) == 1.0);
    CHECK(sphere_moment2(4, 1.0) == 0.25);
    CHECK(sphere_moment2(7, 0.0) == 0.0);
  }

  TEST_CASE("fourth moment") {
    CHECK(sphere_moment4(1, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sphere_moment4(2, 1.0) == 0.375);
    CHECK(sphere_moment4(10, 0.5) == doctest::Approx(0.0015625).epsilon(1e-14));
  }

  TEST_CASE("fourth moment identity") {
    for (int d = 1; d <= 200; ++d) {
      for (double r : {0.1, 0.5, 1.0}) {
        const double m2 = sphere_moment2(d, r);
        CHECK(std::abs(sphere_moment4(d, r) - 3 * m2 * m2 * d / (d + 2.0)) <= 1e-12);
      }
    }
  }

  TEST_CASE("reward variance") {
    CHECK(reward_variance_unit(1) == 1.0);
    CHECK(reward_variance_unit(2) == doctest::Approx(1.125));
  }

  TEST_CASE("information gain") {
    CHECK(information_gain_approx(2, 1.0) == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK(information_gain_approx(5, 0.0) == 0.0);
    for (int d = 1; d <= 256; ++d) {
      for (int i = 0; i <= 10; ++i) {
        const double r = i / 10.0;
        CHECK(information_gain_approx(d, r) <= information_gain_bound(d, r));
      }
    }
  }

  TEST_CASE("expected gap") {
    CHECK(expected_gap(1.0, 1, 1.0) == 0.0);
    CHECK(expected_gap(0.0, 3, 0.7) == doctest::Approx(0.49));
    CHECK(expected_gap(1.0, 4, 1.0) == 0.75);
  }

  TEST_CASE("information ratio") {
    CHECK(information_ratio(2, 1.0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(information_ratio(9, 0.5) == doctest::Approx(information_ratio(9, 1.0)).epsilon(1e-13));
    for (int d = 4; d <= 128; ++d) {
      const double q = information_ratio(d, 1.0) / (static_cast<double>(d) * d);
      CHECK(q >= 0.5);
      CHECK(q <= 2.0);
      CHECK(q == doctest::Approx(1.0 + 1.0 / d - 2.0 / (static_cast<double>(d) * d)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(information_ratio(1, 1.0), DegenerateRatio);
    CHECK_THROWS_AS(information_ratio(3, 0.0), DegenerateRatio);
  }

  TEST_CASE("beta bounds") {
    CHECK(beta_bound(1, 10, 1.0) == doctest::Approx(61.99).epsilon(1e-4));
    CHECK(beta_bound(2, 100, 0.05) - beta_bound(2, 100, 0.1) == doctest::Approx(9 * std::log(2.0)));
    const std::int64_t n = 5000;
    const double alg = 9.0 * (std::log(98.0) + 4.0 * std::log(static_cast<double>(n)));
    CHECK(beta_bound(1, n, std::pow(static_cast<double>(n), -3.0)) == doctest::Approx(alg).epsilon(1e-12));
    CHECK(beta_bound_expectation(3, 300) == doctest::Approx(9 * (1 + 3 * std::log(29400.0))));
  }

  TEST_CASE("lower bound radii") {
    CHECK(lower_bound_radius(10, 1000000, LowerBoundKind::cumulative) == doctest::Approx(0.02604).epsilon(1e-3));
    CHECK(lower_bound_radius(8, 10000, LowerBoundKind::simple) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(lower_bound_radius(8, 4096, LowerBoundKind::simple) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK_THROWS_AS(lower_bound_radius(8, 8, LowerBoundKind::simple), InfeasibleRadius);
  }
}

TEST_SUITE("statistics") {
  TEST_CASE("concentration statistic") {
    Rng rng(RngState{1, 1});
    std::vector<Datum> data;
    for (int i = 0; i < 20; ++i) data.push_back({sample_unit_sphere(3, rng), 0.0});
    const Vector th = sample_unit_sphere(3, rng).coords() * 0.7;
    CHECK(concentration_statistic(data, th, th) == 0.0);
    CHECK(concentration_statistic(data, -th, th) == 0.0);
    const std::vector<Datum> one{{Action(Vector::Unit(2, 0)), 0.0}};
    CHECK(concentration_statistic(one, Vector::Unit(2, 0), Vector::Zero(2)) == 1.0);
  }

  TEST_CASE("scaling fits") {
    const std::vector<std::pair<double, double>> exact{{1, 3}, {4, 6}, {16, 12}};
    CHECK(std::abs(fit_scaling_exponent(exact).slope - 0.5) <= 1e-12);
    const std::vector<std::pair<double, double>> flat{{1, 2}, {3, 2}, {9, 2}};
    CHECK(std::abs(fit_scaling_exponent(flat).slope) <= 1e-12);
    Rng rng(RngState{2, 1});
    std::vector<std::pair<double, double>> noisy;
    for (int i = 1; i <= 20; ++i) noisy.push_back({i, i * i * (1 + 0.01 * rng.normal())});
    CHECK(std::abs(fit_scaling_exponent(noisy).slope - 2.0) <= 0.05);
    const std::vector<std::pair<double, double>> bad{{1, 1}, {2, -1}};
    CHECK_THROWS_AS(fit_scaling_exponent(bad), InvalidArgument);
  }
}

TEST_SUITE("lemmas") {
  TEST_CASE("curvature inequality") {
    Rng rng(RngState{3, 1});
    CHECK(curvature_violations(4, 100000, rng) == 0);
    CHECK(curvature_slack(Vector::Unit(2, 0), Vector::Unit(2, 0) * 0.3) == doctest::Approx(2 * 0.49));
  }

  TEST_CASE("projection probability") {
    Rng rng(RngState{3, 2});
    CHECK(sphere_projection_probability_check(5, 1, 1000, rng) == 1.0);
    const double p2 = sphere_projection_probability_check(6, 2, 100000, rng);
    const double exact = 1.0 - 2.0 * std::asin(1.0 / std::sqrt(2.0)) / std::numbers::pi;
    CHECK(std::abs(p2 - exact) <= 3 * std::sqrt(exact * (1 - exact) / 100000));
    CHECK(sphere_projection_probability_check(60, 50, 100000, rng) >= 0.15);
    CHECK_THROWS_AS(sphere_projection_probability_check(3, 4, 10, rng), InvalidArgument);
  }

  TEST_CASE("gaussian tail bound") {
    Rng rng(RngState{3, 3});
    std::vector<double> w(50);
    for (double& x : w) x = rng.normal();
    for (double delta : {0.1, 0.01}) CHECK(gaussian_tail_violation_rate(w, delta, 10000, rng) <= delta);
    const std::vector<double> ones(4, 1.0);
    CHECK(gaussian_tail_threshold(ones, 0.1) == doctest::Approx(std::sqrt(8 * std::log(20.0)) / 4));
  }
}

TEST_SUITE("monte carlo") {
  TEST_CASE("moments agree with closed forms") {
    std::uint64_t stream = 0;
    for (int d : {2, 4, 10}) {
      for (double r : {0.5, 1.0}) {
        const SphereMoments m = monte_carlo_moments(d, r, 1.0, 1000000, RngState{4, stream++});
        CHECK(std::abs(m.moment2.value - sphere_moment2(d, r)) <= 3 * m.moment2.standard_error);
        CHECK(std::abs(m.moment4.value - sphere_moment4(d, r)) <= 3 * m.moment4.standard_error);
        CHECK(std::abs(m.reward_mean.value - sphere_moment2(d, r)) <= 3 * m.reward_mean.standard_error);
        if (r == 1.0) {
          CHECK(std::abs(m.reward_variance.value - reward_variance_unit(d)) <= 3 * m.reward_variance.standard_error);
        }
      }
    }
  }

  TEST_CASE("deterministic given the stream") {
    const SphereMoments a = monte_carlo_moments(3, 1.0, 1.0, 100000, RngState{5, 5});
    const SphereMoments b = monte_carlo_moments(3, 1.0, 1.0, 100000, RngState{5, 5});
    CHECK(a.moment4.value == b.moment4.value);
    CHECK(a.reward_variance.value == b.reward_variance.value);
  }
}
