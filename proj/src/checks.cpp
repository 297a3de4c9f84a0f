// checks.cpp
#include "phase_bandit/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>

#include "phase_bandit/errors.hpp"
#include "phase_bandit/kernels.hpp"

namespace phase_bandit {

namespace {

struct Verdict {
  bool passed;
  std::string detail;
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

bool within_se(const MomentEstimate& est, double exact, double k = 3.0) {
  // A degenerate distribution (d = 1) has zero standard error; allow rounding.
  const double tol = std::max(k * est.standard_error, 1e-12 * std::abs(exact));
  return std::abs(est.value - exact) <= tol;
}

Verdict closed_form_moments(const CheckOptions& opt) {
  int failures = 0;
  double worst = 0.0;
  std::uint64_t stream = 0;
  for (int d : {1, 2, 5, 20}) {
    for (double r : {0.5, 1.0}) {
      const SphereMoments mc = monte_carlo_moments(d, r, 1.0, 1000000, RngState{opt.seed, stream++});
      const double m2 = sphere_moment2(d, r);
      const double m4 = sphere_moment4(d, r);
      failures += !within_se(mc.moment2, m2) + !within_se(mc.moment4, m4);
      if (mc.moment2.standard_error > 0) worst = std::max(worst, std::abs(mc.moment2.value - m2) / mc.moment2.standard_error);
      if (mc.moment4.standard_error > 0) worst = std::max(worst, std::abs(mc.moment4.value - m4) / mc.moment4.standard_error);
      if (r == 1.0) {
        const double v = reward_variance_unit(d);
        failures += !within_se(mc.reward_variance, v);
        worst = std::max(worst, std::abs(mc.reward_variance.value - v) / mc.reward_variance.standard_error);
      }
    }
  }
  return {failures == 0, fmt("24 comparisons, %d outside 3 SE, worst deviation %.2f SE", failures, worst)};
}

Verdict information_inequality(const CheckOptions&) {
  int gain_violations = 0;
  for (int d = 1; d <= 256; ++d) {
    for (int i = 1; i <= 10; ++i) {
      const double r = i / 10.0;
      if (!(information_gain_approx(d, r) <= information_gain_bound(d, r))) ++gain_violations;
    }
  }
  double lo = 1e300, hi = -1e300;
  for (int d = 4; d <= 128; ++d) {
    const double q = information_ratio(d, 1.0) / (static_cast<double>(d) * d);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  const bool ok = gain_violations == 0 && lo >= 0.5 && hi <= 2.0;
  return {ok, fmt("gain bound violations %d of 2560; ratio/d^2 in [%.4f, %.4f]", gain_violations, lo, hi)};
}

Verdict lemma_suite(const CheckOptions& opt) {
  Rng rng(RngState{opt.seed, 3});
  std::int64_t curvature = 0;
  for (int d : {2, 5, 20}) {
    Rng sub = rng.split(static_cast<std::uint64_t>(d));
    curvature += curvature_violations(d, 100000, sub);
  }
  double min_prob = 1.0;
  for (int m : {1, 2, 10, 50}) {
    Rng sub = rng.split(100 + static_cast<std::uint64_t>(m));
    min_prob = std::min(min_prob, sphere_projection_probability_check(64, m, 100000, sub));
  }
  Rng wrng = rng.split(200);
  std::vector<double> weights(100);
  for (double& w : weights) w = wrng.normal();
  double worst_excess = -1.0;
  std::string rates;
  for (double delta : {0.1, 0.01}) {
    Rng sub = rng.split(300 + static_cast<std::uint64_t>(1.0 / delta));
    const double rate = gaussian_tail_violation_rate(weights, delta, 10000, sub);
    worst_excess = std::max(worst_excess, rate - delta);
    rates += fmt(" %.4f(delta=%g)", rate, delta);
  }
  const bool ok = curvature == 0 && min_prob >= 0.15 && worst_excess <= 0.0;
  return {ok, fmt("curvature violations %lld of 3e5; min projection probability %.4f; tail rates%s",
                  static_cast<long long>(curvature), min_prob, rates.c_str())};
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

Verdict solver_oracle(const CheckOptions& opt) {
  Rng rng(RngState{opt.seed, 4});
  double worst_gap = -1e300;
  for (int inst = 0; inst < 20; ++inst) {
    Rng sub = rng.split(static_cast<std::uint64_t>(inst));
    const double sigma = inst < 10 ? 0.0 : 0.1;
    const double r = 0.3 + 0.7 * sub.uniform();
    const Vector theta = r * sample_unit_sphere(2, sub).coords();
    const auto data = uniform_data(theta, sigma, 30, sub);
    FeasibleSet feasible;
    feasible.half_space = HalfSpace{theta / r, r / 8.0};
    const EstimatorProblem problem(data, feasible);
    const double ls = quartic_loss(constrained_least_squares(problem, SolverConfig{}, sub), problem);
    const double grid = quartic_loss(brute_force_ls_oracle(problem, 2001), problem);
    worst_gap = std::max(worst_gap, ls - grid);
  }
  double worst_rel = 0.0;
  constexpr double h = 1e-5;
  for (int inst = 0; inst < 100; ++inst) {
    Rng sub = rng.split(1000 + static_cast<std::uint64_t>(inst));
    const int d = 1 + inst % 8;
    const Vector theta = sample_unit_sphere(d, sub).coords();
    const EstimatorProblem problem(uniform_data(theta, 0.5, 40, sub), FeasibleSet{});
    const Vector x = sub.uniform() * sample_unit_sphere(d, sub).coords();
    const Vector g = quartic_loss_gradient(x, problem);
    Vector fd(d);
    for (int k = 0; k < d; ++k) {
      Vector xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      fd[k] = (quartic_loss(xp, problem) - quartic_loss(xm, problem)) / (2 * h);
    }
    worst_rel = std::max(worst_rel, (g - fd).norm() / std::max(g.norm(), 1e-8));
  }
  const bool ok = worst_gap <= 1e-3 && worst_rel <= 1e-4;
  return {ok, fmt("max loss(solver) - loss(grid) = %.3e over 20 instances; max gradient relative error %.3e",
                  worst_gap, worst_rel)};
}

Verdict concentration(const CheckOptions& opt) {
  constexpr int d = 3;
  constexpr std::int64_t n = 300;
  constexpr double alpha = 1.0 / 64.0;
  Rng rng(RngState{opt.seed, 5});
  const double lambda = etc_mixing_weight(alpha);
  double total = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    Rng sub = rng.split(static_cast<std::uint64_t>(trial));
    const Vector theta = sample_unit_sphere(d, sub).coords();
    const Action warm(theta);
    std::vector<Datum> data;
    for (std::int64_t j = 0; j < n; ++j) {
      const Action a = etc_exploration_action(warm, lambda, j);
      const double ip = a.coords().dot(theta);
      data.push_back({a, ip * ip + sub.normal()});
    }
    FeasibleSet feasible;
    feasible.half_space = HalfSpace{theta, std::sqrt(alpha)};
    const EstimatorProblem problem(data, feasible);
    const Vector theta_hat = constrained_least_squares(problem, SolverConfig{}, sub);
    total += concentration_statistic(data, theta_hat, theta);
  }
  const double mean = total / 500.0;
  const double bound = beta_bound_expectation(d, n);
  return {mean <= bound, fmt("mean statistic %.3f, bound %.3f", mean, bound)};
}

Verdict warm_start_guarantee(const CheckOptions& opt) {
  ExperimentConfig cfg;
  cfg.policy = PolicyKind::warm_only;
  cfg.d_grid = {5};
  cfg.n_grid = {100000};
  cfg.r_mode = RadiusMode{RadiusMode::Kind::fixed, 1.0};
  cfg.noise_sigma = 1.0;
  cfg.constant_scale = 0.05;
  cfg.seeds = 200;
  cfg.base_seed = opt.seed;

  std::vector<char> invariant_ok(static_cast<std::size_t>(cfg.seeds), 0);
  RunOptions run;
  run.workers = opt.workers;
  run.runner = [&](const Cell& cell, int seed) {
    Rng theta_rng(RngState{cfg.base_seed, stream_key({static_cast<std::uint64_t>(seed), 6})});
    const Environment env = Environment::on_sphere(cell.d, cell.r, theta_rng, cfg.noise_sigma);
    WarmStartConfig wc;
    wc.horizon = cell.n;
    wc.radius = cell.r;
    wc.constant_scale = cfg.constant_scale;
    const PolicyOutcome out =
        warm_start_run(env, wc, RngState{cfg.base_seed, stream_key({static_cast<std::uint64_t>(seed), 7})});
    const WarmOutput& w = *out.warm;

    const double tau2 = cell.r * cell.r / cell.d;
    bool ok = !w.basis.empty() && std::abs(w.action.coords().norm() - 1.0) <= 1e-9;
    for (std::size_t i = 0; i < w.basis.size(); ++i) {
      const double sq = w.basis[i].squaredNorm();
      ok = ok && sq >= tau2 * (1 - 1e-12) && sq <= 1.0 + 1e-12;
      for (std::size_t j = 0; j < i; ++j) ok = ok && std::abs(w.basis[i].dot(w.basis[j])) <= 1e-9;
    }
    invariant_ok[static_cast<std::size_t>(seed)] = ok;

    SeedMetrics m;
    m.rounds_played = static_cast<std::int64_t>(out.trajectory.size());
    m.warm_rounds = static_cast<double>(w.rounds);
    m.warm_success = w.halted && w.rounds < cell.n && warm_succeeded(env, w);
    return m;
  };
  const RegretSummary summary = run_experiment(cfg, run);
  const double rate = summary.cells.at(0).warm_success_rate.value_or(0.0);
  const auto bad = std::count(invariant_ok.begin(), invariant_ok.end(), 0);
  return {rate >= 0.95 && bad == 0,
          fmt("success rate %.3f over 200 seeds, mean T %.0f, invariant failures %lld", rate,
              summary.cells.at(0).mean_warm_rounds.value_or(0.0), static_cast<long long>(bad))};
}

std::string points_text(const ScalingFit& fit, const RegretSummary& summary, SweepAxis axis) {
  std::string s;
  for (const auto& c : summary.cells) {
    s += fmt(" %s=%lld:%.1f(%.1f)", axis == SweepAxis::n ? "n" : "d",
             static_cast<long long>(axis == SweepAxis::n ? c.n : c.d), c.mean_cum_regret, c.se_cum_regret.value_or(0));
  }
  (void)fit;
  return s;
}

Verdict regret_in_n(const CheckOptions& opt) {
  RunOptions run;
  run.workers = opt.workers;
  const RegretSummary summary = run_experiment(regret_in_n_config(opt.seed), run);
  const ScalingFit fit = fit_summary(summary, SweepAxis::n, RegretMetric::cumulative);
  return {fit.slope >= 0.35 && fit.slope <= 0.65,
          fmt("slope %.3f;%s", fit.slope, points_text(fit, summary, SweepAxis::n).c_str())};
}

Verdict regret_in_d(const CheckOptions& opt) {
  RunOptions run;
  run.workers = opt.workers;
  const RegretSummary summary = run_experiment(regret_in_d_config(opt.seed), run);
  const ScalingFit fit = fit_summary(summary, SweepAxis::d, RegretMetric::cumulative);
  return {fit.slope >= 0.7 && fit.slope <= 1.4,
          fmt("slope %.3f;%s", fit.slope, points_text(fit, summary, SweepAxis::d).c_str())};
}

Verdict adaptive_gap(const CheckOptions& opt) {
  RunOptions run;
  run.workers = opt.workers;
  const RegretSummary uniform = run_experiment(adaptive_gap_config(PolicyKind::uniform_pure, opt.seed), run);
  const RegretSummary adaptive = run_experiment(adaptive_gap_config(PolicyKind::full, opt.seed), run);
  if (uniform.cells.size() != 3 || adaptive.cells.size() != 3) {
    return {false, "expected three feasible cells per policy"};
  }
  bool ok = true;
  double prev_ratio = 0.0;
  std::string detail;
  for (std::size_t i = 0; i < 3; ++i) {
    const CellSummary& u = uniform.cells[i];
    const CellSummary& a = adaptive.cells[i];
    const double ratio = u.mean_simple_regret / a.mean_simple_regret;
    ok = ok && u.mean_simple_regret > a.mean_simple_regret && ratio >= prev_ratio;
    prev_ratio = ratio;
    detail += fmt(" d=%d r=%.3f uniform %.4f(%.4f) full %.4f(%.4f) ratio %.3f;", u.d, u.r, u.mean_simple_regret,
                  u.se_simple_regret.value_or(0), a.mean_simple_regret, a.se_simple_regret.value_or(0), ratio);
  }
  detail.pop_back();
  return {ok, detail.substr(1)};
}

Verdict determinism(const CheckOptions& opt) {
  ExperimentConfig cfg;
  cfg.policy = PolicyKind::full;
  cfg.d_grid = {3, 5};
  cfg.n_grid = {2000, 4000};
  cfg.seeds = 6;
  cfg.constant_scale = kSweepScale;
  cfg.base_seed = opt.seed;
  std::vector<std::string> outputs;
  for (int workers : {1, 1, 3, 4}) {
    RunOptions run;
    run.workers = workers;
    outputs.push_back(format_csv(run_experiment(cfg, run)));
  }
  cfg.policy = PolicyKind::uniform_pure;
  std::vector<std::string> uniform;
  for (int workers : {1, 3}) {
    RunOptions run;
    run.workers = workers;
    uniform.push_back(format_csv(run_experiment(cfg, run)));
  }
  const bool ok = std::all_of(outputs.begin(), outputs.end(), [&](const auto& s) { return s == outputs[0]; }) &&
                  uniform[0] == uniform[1];
  return {ok, fmt("%zu bytes of CSV compared across worker counts {1,1,3,4} and {1,3}", outputs[0].size())};
}

struct Suite {
  const char* title;
  Verdict (*run)(const CheckOptions&);
};

constexpr Suite kSuites[kCheckCount] = {
    {"closed-form moments", closed_form_moments},
    {"information gain inequality and ratio", information_inequality},
    {"lemma suite", lemma_suite},
    {"solver oracle equivalence", solver_oracle},
    {"concentration of the least squares estimator", concentration},
    {"warm-start guarantee", warm_start_guarantee},
    {"regret scaling in n", regret_in_n},
    {"regret scaling in d", regret_in_d},
    {"adaptive vs non-adaptive simple regret", adaptive_gap},
    {"determinism across worker counts", determinism},
};

}  // namespace

ExperimentConfig regret_in_n_config(std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.policy = PolicyKind::full;
  cfg.d_grid = {5};
  cfg.n_grid = {4096, 8192, 16384, 32768, 65536};
  cfg.r_mode = RadiusMode{RadiusMode::Kind::fixed, 1.0};
  cfg.noise_sigma = 1.0;
  cfg.constant_scale = kSweepScale;
  cfg.seeds = 50;
  cfg.base_seed = seed;
  return cfg;
}

ExperimentConfig regret_in_d_config(std::uint64_t seed) {
  ExperimentConfig cfg = regret_in_n_config(seed);
  cfg.d_grid = {4, 8, 16, 32};
  cfg.n_grid = {16384};
  return cfg;
}

ExperimentConfig adaptive_gap_config(PolicyKind policy, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.policy = policy;
  cfg.d_grid = {8, 16, 32};
  cfg.n_grid = {4096};
  cfg.r_mode = RadiusMode{RadiusMode::Kind::lower_bound_simple, 0.0};
  cfg.noise_sigma = 1.0;
  cfg.constant_scale = kSweepScale;
  cfg.seeds = 50;
  cfg.base_seed = seed;
  return cfg;
}

std::string_view check_title(int id) {
  if (id < 1 || id > kCheckCount) throw InvalidArgument("no check numbered " + std::to_string(id));
  return kSuites[id - 1].title;
}

CheckResult run_check(int id, const CheckOptions& options) {
  CheckResult res;
  res.id = id;
  res.title = std::string(check_title(id));
  const auto start = std::chrono::steady_clock::now();
  try {
    const Verdict v = kSuites[id - 1].run(options);
    res.passed = v.passed;
    res.detail = v.detail;
  } catch (const std::exception& e) {
    res.passed = false;
    res.detail = std::string("exception: ") + e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

std::string format_check_line(const CheckResult& r) {
  return fmt("%s %2d  %s: ", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str()) + r.detail +
         fmt(" (%.1f s)", r.seconds);
}

}  // namespace phase_bandit
