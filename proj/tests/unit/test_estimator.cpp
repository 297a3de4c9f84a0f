#include <doctest.h>

#include <cmath>
#include <vector>

#include "phase_bandit/core.hpp"
#include "phase_bandit/estimator.hpp"

using namespace phase_bandit;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

std::vector<Datum> noiseless(const Vector& theta, const std::vector<Vector>& actions) {
  std::vector<Datum> data;
  for (const auto& a : actions) {
    const double ip = a.dot(theta);
    data.push_back({Action(a), ip * ip});
  }
  return data;
}

std::vector<Datum> uniform_data(const Vector& theta, double sigma, int count, Rng& rng) {
  std::vector<Datum> data;
  for (int t = 0; t < count; ++t) {
    const Action a = sample_unit_sphere(static_cast<int>(theta.size()), rng);
    const double ip = a.coords().dot(theta);
    data.push_back({a, ip * ip + sigma * rng.normal()});
  }
  return data;
}

const std::vector<Vector> kThreeActions{vec({1, 0}), vec({0, 1}), vec({1, 1}) / std::sqrt(2.0)};

}  // namespace

TEST_SUITE("problem") {
  TEST_CASE("grouping merges repeated actions") {
    Rng rng(RngState{1, 1});
    std::vector<Datum> data;
    for (int i = 0; i < 10; ++i) data.push_back({Action(vec({1, 0})), 1.0 + 0.1 * i});
    for (int i = 0; i < 4; ++i) data.push_back({Action(vec({0, 1})), 0.5});
    const EstimatorProblem p(data, FeasibleSet{});
    CHECK(p.design().rows() == 2);
    CHECK(p.observations() == 14);
    CHECK(p.mean_reward() == doctest::Approx((10 * 1.45 + 4 * 0.5) / 14.0));
    // The grouped loss equals the ungrouped sum.
    const Vector th = vec({0.3, -0.2});
    double direct = 0.0;
    for (const auto& d : data) direct += 0.5 * std::pow(d.reward - std::pow(d.action.coords().dot(th), 2), 2);
    CHECK(quartic_loss(th, p) == doctest::Approx(direct).epsilon(1e-13));
  }

  TEST_CASE("invalid problems") {
    CHECK_THROWS_AS(EstimatorProblem(std::vector<Datum>{}, FeasibleSet{}), InvalidProblem);
    std::vector<Datum> mixed{{Action(vec({1, 0})), 1.0}, {Action(vec({1, 0, 0})), 1.0}};
    CHECK_THROWS_AS(EstimatorProblem(mixed, FeasibleSet{}), InvalidProblem);
    FeasibleSet empty;
    empty.half_space = HalfSpace{vec({1, 0}), 2.0};
    CHECK_THROWS_AS(EstimatorProblem(noiseless(vec({1, 0}), kThreeActions), empty), InvalidProblem);
  }
}

TEST_SUITE("loss") {
  TEST_CASE("exact fit has zero loss") {
    const Vector th = vec({0.6, 0.8});
    const EstimatorProblem p(noiseless(th, kThreeActions), FeasibleSet{});
    CHECK(quartic_loss(th, p) == doctest::Approx(0.0).epsilon(1e-30));
  }

  TEST_CASE("single datum at the origin") {
    const EstimatorProblem p(std::vector<Datum>{{Action(vec({1, 0})), 1.0}}, FeasibleSet{});
    CHECK(quartic_loss(Vector::Zero(2), p) == 0.5);
  }

  TEST_CASE("sign symmetry holds to the last bit") {
    Rng rng(RngState{2, 1});
    const EstimatorProblem p(uniform_data(vec({0.1, 0.5, -0.3}), 1.0, 2000, rng), FeasibleSet{});
    for (int i = 0; i < 50; ++i) {
      const Vector th = sample_unit_sphere(3, rng).coords() * rng.uniform();
      CHECK(quartic_loss(th, p) == quartic_loss(-th, p));
    }
  }

  TEST_CASE("gradient matches central differences") {
    Rng rng(RngState{2, 2});
    constexpr double h = 1e-5;
    for (int inst = 0; inst < 100; ++inst) {
      const int d = 1 + inst % 6;
      const Vector theta = sample_unit_sphere(d, rng).coords() * rng.uniform();
      const EstimatorProblem p(uniform_data(theta, 0.3, 30, rng), FeasibleSet{});
      const Vector x = sample_unit_sphere(d, rng).coords() * rng.uniform();
      const Vector g = quartic_loss_gradient(x, p);
      Vector fd(d);
      for (int k = 0; k < d; ++k) {
        Vector xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        fd[k] = (quartic_loss(xp, p) - quartic_loss(xm, p)) / (2 * h);
      }
      CHECK((g - fd).norm() <= 1e-4 * std::max(g.norm(), 1e-8));
    }
  }
}

TEST_SUITE("spectral init") {
  TEST_CASE("axis example") {
    const EstimatorProblem p(noiseless(vec({1, 0}), {vec({1, 0}), vec({0, 1})}), FeasibleSet{});
    const Vector init = spectral_init(p);
    CHECK(std::abs(std::abs(init[0]) - 1.0) <= 1e-6);
    CHECK(std::abs(init[1]) <= 1e-6);
  }

  TEST_CASE("zero rewards give the zero vector") {
    const EstimatorProblem p(noiseless(vec({0, 0}), kThreeActions), FeasibleSet{});
    CHECK(spectral_init(p).norm() == 0.0);
  }

  TEST_CASE("alignment on random noiseless designs") {
    Rng rng(RngState{3, 1});
    int good = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const double r = 0.2 + 0.8 * rng.uniform();
      const Vector theta = sample_unit_sphere(3, rng).coords() * r;
      const EstimatorProblem p(uniform_data(theta, 0.0, 50, rng), FeasibleSet{});
      const Vector init = spectral_init(p);
      if (init.norm() > 0 && std::pow(init.normalized().dot(theta / r), 2) >= 0.5) ++good;
    }
    CHECK(good >= 90);
  }

  TEST_CASE("length is clipped to the ball radius") {
    const EstimatorProblem p(std::vector<Datum>{{Action(vec({1, 0})), 50.0}}, FeasibleSet{0.7, std::nullopt});
    CHECK(spectral_init(p).norm() == doctest::Approx(0.7));
  }
}

TEST_SUITE("projection") {
  TEST_CASE("interior point is unchanged") {
    const Vector th = vec({0.2, -0.1});
    CHECK(project_feasible(th, FeasibleSet{}) == th);
  }

  TEST_CASE("radial scaling") {
    const Vector th = vec({1.2, -1.6});
    CHECK((project_feasible(th, FeasibleSet{}) - th / 2).norm() <= 1e-15);
  }

  TEST_CASE("half-space example") {
    FeasibleSet fs;
    fs.half_space = HalfSpace{vec({1, 0}), 0.5};
    CHECK((project_feasible(vec({-1, 0}), fs) - vec({0.5, 0})).norm() <= 1e-9);
  }

  TEST_CASE("matches dense grid minimisation of distance") {
    Rng rng(RngState{4, 1});
    for (int trial = 0; trial < 20; ++trial) {
      FeasibleSet fs;
      const Vector dir = sample_unit_sphere(2, rng).coords();
      fs.half_space = HalfSpace{dir, 0.8 * rng.uniform()};
      const Vector x = sample_unit_sphere(2, rng).coords() * 2.0 * rng.uniform();
      const Vector p = project_feasible(x, fs);
      CHECK(fs.contains(p));
      // p is no farther than any feasible grid point, and satisfies the
      // projection inequality <x - p, q - p> <= 0 for all of them.
      double best = 1e300, worst_inner = -1e300;
      constexpr int G = 801;
      for (int i = 0; i < G; ++i) {
        for (int j = 0; j < G; ++j) {
          Vector q(2);
          q << -1.0 + 2.0 * i / (G - 1), -1.0 + 2.0 * j / (G - 1);
          if (!fs.contains(q, 0.0)) continue;
          best = std::min(best, (q - x).norm());
          worst_inner = std::max(worst_inner, (x - p).dot(q - p));
        }
      }
      CHECK((p - x).norm() <= best + 1e-12);
      CHECK(worst_inner <= 1e-9);
    }
  }
}

TEST_SUITE("solver") {
  TEST_CASE("recovers theta with a half-space") {
    const Vector th = vec({0.6, 0.8});
    FeasibleSet fs;
    fs.half_space = HalfSpace{th, 0.5};
    const EstimatorProblem p(noiseless(th, kThreeActions), fs);
    Rng rng(RngState{5, 1});
    const Vector out = constrained_least_squares(p, SolverConfig{}, rng);
    CHECK((out - th).norm() <= 1e-3);
    const Vector grid = brute_force_ls_oracle(p, 2001);
    CHECK((grid - th).norm() <= 1e-3 * std::sqrt(2.0));
  }

  TEST_CASE("without a half-space the optimum is sign ambiguous") {
    const Vector th = vec({0.6, 0.8});
    const EstimatorProblem p(noiseless(th, kThreeActions), FeasibleSet{});
    Rng rng(RngState{5, 2});
    const Vector out = constrained_least_squares(p, SolverConfig{}, rng);
    CHECK(std::abs(quartic_loss(out, p) - quartic_loss(th, p)) <= 1e-6);
    CHECK(std::min((out - th).norm(), (out + th).norm()) <= 1e-3);
  }

  TEST_CASE("pure noise stays near the origin") {
    Rng rng(RngState{5, 3});
    const EstimatorProblem p(uniform_data(Vector::Zero(3), 0.01, 100, rng), FeasibleSet{});
    CHECK(constrained_least_squares(p, SolverConfig{}, rng).norm() <= 0.3);
  }

  TEST_CASE("output is feasible and no worse than every start") {
    Rng rng(RngState{5, 4});
    for (int trial = 0; trial < 30; ++trial) {
      const int d = 2 + trial % 5;
      const Vector theta = sample_unit_sphere(d, rng).coords() * (0.3 + 0.7 * rng.uniform());
      FeasibleSet fs{0.9, HalfSpace{theta.normalized(), 0.1}};
      const EstimatorProblem p(uniform_data(theta, 0.5, 60, rng), fs);
      const SolveReport rep = constrained_least_squares_report(p, SolverConfig{}, rng);
      CHECK(fs.contains(rep.theta, 1e-9));
      CHECK(rep.start_losses.size() == 5);
      for (double l : rep.start_losses) CHECK(rep.loss <= l);
      CHECK(rep.loss == quartic_loss(rep.theta, p));
    }
  }

  TEST_CASE("descent never increases the loss") {
    Rng rng(RngState{5, 5});
    const Vector theta = sample_unit_sphere(4, rng).coords();
    const EstimatorProblem p(uniform_data(theta, 1.0, 200, rng), FeasibleSet{});
    const DescentResult res = projected_gradient_descent(p, sample_unit_sphere(4, rng).coords() * 0.5, SolverConfig{}, true);
    REQUIRE(res.loss_trace.size() >= 2);
    for (std::size_t i = 1; i < res.loss_trace.size(); ++i) CHECK(res.loss_trace[i] <= res.loss_trace[i - 1]);
    CHECK(res.converged);
  }

  TEST_CASE("oracle dominance on d = 2") {
    Rng rng(RngState{5, 6});
    for (int inst = 0; inst < 6; ++inst) {
      const Vector theta = sample_unit_sphere(2, rng).coords() * (0.3 + 0.7 * rng.uniform());
      FeasibleSet fs;
      fs.half_space = HalfSpace{theta.normalized(), theta.norm() / 8};
      const EstimatorProblem p(uniform_data(theta, inst % 2 ? 0.1 : 0.0, 30, rng), fs);
      const double ls = quartic_loss(constrained_least_squares(p, SolverConfig{}, rng), p);
      const double grid = quartic_loss(brute_force_ls_oracle(p, 2001), p);
      CHECK(ls <= grid + 1e-3);
    }
  }

  TEST_CASE("config validation") {
    SolverConfig c;
    c.restarts = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = SolverConfig{};
    c.step_size = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = SolverConfig{};
    c.init_mode = InitMode::warm;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
  }
}

TEST_SUITE("grid oracle") {
  TEST_CASE("half-space selects the positive side") {
    const Vector th = vec({-0.3, 0.9});
    FeasibleSet fs;
    fs.half_space = HalfSpace{th.normalized(), 0.1};
    const EstimatorProblem p(noiseless(th, kThreeActions), fs);
    const Vector g = brute_force_ls_oracle(p, 401);
    CHECK((g - th).norm() <= 2.0 / 400 * std::sqrt(2.0));
  }

  TEST_CASE("preconditions") {
    const EstimatorProblem p4(noiseless(Vector::Unit(4, 0), {Vector::Unit(4, 0)}), FeasibleSet{});
    CHECK_THROWS_AS(brute_force_ls_oracle(p4, 11), UnsupportedDimension);
    const EstimatorProblem p2(noiseless(vec({1, 0}), kThreeActions), FeasibleSet{});
    CHECK_THROWS_AS(brute_force_ls_oracle(p2, 10), InvalidArgument);
  }
}

TEST_SUITE("radius estimate") {
  TEST_CASE("noiseless") {
    const Environment env(Vector::Unit(2, 0), 0.0);
    BanditSession s(env, 10000, RngState{6, 1});
    Rng rng(RngState{6, 2});
    const RadiusEstimate est = estimate_radius_squared(s, 10000, 0.05, 0.0, rng);
    CHECK(std::abs(est.value - 1.0) <= 0.05);
    CHECK(s.used() == 10000);
  }

  TEST_CASE("zero parameter") {
    const Environment env(Vector::Zero(4), 1.0);
    BanditSession s(env, 5000, RngState{6, 3});
    Rng rng(RngState{6, 4});
    CHECK(estimate_radius_squared(s, 5000, 0.05, 1.0, rng).value <= 3.0 * 4 / std::sqrt(5000.0));
  }

  TEST_CASE("coverage at d = 5") {
    int hits = 0;
    for (int trial = 0; trial < 100; ++trial) {
      Rng rng(RngState{7, static_cast<std::uint64_t>(trial)});
      const Environment env = Environment::on_sphere(5, 1.0, rng, 1.0);
      BanditSession s(env, 100000, rng.child(1));
      if (std::abs(estimate_radius_squared(s, 100000, 0.05, 1.0, rng).value - 1.0) <= 0.05) ++hits;
    }
    CHECK(hits >= 95);
  }

  TEST_CASE("budget precondition") {
    const Environment env(Vector::Unit(2, 0), 0.0);
    BanditSession s(env, 10, RngState{6, 1});
    Rng rng(RngState{6, 2});
    CHECK_THROWS_AS(estimate_radius_squared(s, 0, 0.05, 1.0, rng), InvalidArgument);
  }
}
