// phase_bandit: command line front end for the bandit phase retrieval
// simulation library.
//
//   phase_bandit simulate --config exp.json --seeds 20 --output-path out.csv
//   phase_bandit sweep --axis n --policy full --n-grid 4096,8192,16384
//   phase_bandit moments --d 5 --r 1
//   phase_bandit check --criteria 1,2,10
//   phase_bandit plot --csv out.csv --axis n --out out.svg --log-log
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error, 3 failed check.
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phase_bandit/analysis.hpp"
#include "phase_bandit/checks.hpp"
#include "phase_bandit/errors.hpp"
#include "phase_bandit/harness.hpp"

namespace pb = phase_bandit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitCheck = 3;

const char* const kFields[] = {"policy",         "d-grid", "n-grid",    "r-mode",     "noise-sigma",
                               "constant-scale", "seeds",  "base-seed", "output-path"};

struct ExperimentArgs {
  std::string config_path;
  std::map<std::string, std::string> overrides;
  int workers = 0;
  bool fixed_theta = false;
};

void add_experiment_options(CLI::App* cmd, ExperimentArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON experiment configuration");
  for (const char* field : kFields) {
    cmd->add_option_function<std::string>(
        std::string("--") + field, [&args, field](const std::string& v) { args.overrides[field] = v; },
        std::string("override the '") + field + "' config field");
  }
  cmd->add_option("--workers", args.workers, "worker threads (default: PHASE_BANDIT_WORKERS or all cores)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--fixed-theta", args.fixed_theta, "use theta* = r e_1 instead of a uniform draw");
}

pb::ExperimentConfig build_config(const ExperimentArgs& args) {
  pb::ExperimentConfig cfg = args.config_path.empty() ? pb::ExperimentConfig{} : pb::load_config_file(args.config_path);
  for (const auto& [field, value] : args.overrides) pb::apply_config_override(cfg, field, value);
  cfg.validate();
  return cfg;
}

pb::RunOptions run_options(const ExperimentArgs& args) {
  pb::RunOptions opts;
  opts.workers = args.workers;
  opts.fixed_theta = args.fixed_theta;
  return opts;
}

void write_summary(const pb::RegretSummary& summary, const std::string& path) {
  for (const auto& w : summary.warnings) std::cerr << "warning: " << w << '\n';
  if (path.empty() || path == "-") {
    std::cout << pb::format_csv(summary);
  } else {
    pb::emit_csv(summary, path);
    std::cerr << "wrote " << summary.cells.size() << " cells to " << path << '\n';
  }
}

pb::SweepAxis parse_axis(const std::string& s) {
  if (s == "n") return pb::SweepAxis::n;
  if (s == "d") return pb::SweepAxis::d;
  throw pb::ConfigError("axis must be 'n' or 'd', got '" + s + "'");
}

std::optional<pb::RegretMetric> parse_metric(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "cumulative") return pb::RegretMetric::cumulative;
  if (s == "simple") return pb::RegretMetric::simple;
  throw pb::ConfigError("metric must be 'cumulative' or 'simple', got '" + s + "'");
}

int cmd_simulate(const ExperimentArgs& args) {
  const pb::ExperimentConfig cfg = build_config(args);
  write_summary(pb::run_experiment(cfg, run_options(args)), cfg.output_path);
  return kExitOk;
}

int cmd_sweep(const ExperimentArgs& args, const std::string& axis_name, const std::string& metric_name) {
  const pb::ExperimentConfig cfg = build_config(args);
  const pb::SweepAxis axis = parse_axis(axis_name);
  const pb::RegretMetric metric = parse_metric(metric_name).value_or(pb::default_metric(cfg.policy));
  const pb::RegretSummary summary = pb::run_experiment(cfg, run_options(args));
  write_summary(summary, cfg.output_path);
  const pb::ScalingFit fit = pb::fit_summary(summary, axis, metric);
  std::fprintf(stderr, "fit: log %s regret = %.6g + %.6g log %s (residual rms %.3g, %zu points)\n",
               metric == pb::RegretMetric::cumulative ? "cumulative" : "simple", fit.intercept, fit.slope,
               axis_name.c_str(), fit.residual_rms, fit.points.size());
  return kExitOk;
}

int cmd_moments(const std::vector<int>& dims, const std::vector<double>& radii, double sigma, std::int64_t samples,
                std::uint64_t seed) {
  std::printf("%4s %6s %14s %14s %10s %14s %14s %10s %12s %12s\n", "d", "r", "E<A,t>^2", "mc", "se", "E<A,t>^4",
              "mc", "se", "info_gain", "info_ratio");
  std::uint64_t stream = 0;
  for (int d : dims) {
    for (double r : radii) {
      const pb::SphereMoments mc = pb::monte_carlo_moments(d, r, sigma, samples, pb::RngState{seed, stream++});
      const double ratio = d >= 2 ? pb::information_ratio(d, r) : 0.0;
      std::printf("%4d %6.3f %14.8f %14.8f %10.2e %14.8f %14.8f %10.2e %12.4e %12.4e\n", d, r, pb::sphere_moment2(d, r),
                  mc.moment2.value, mc.moment2.standard_error, pb::sphere_moment4(d, r), mc.moment4.value,
                  mc.moment4.standard_error, pb::information_gain_approx(d, r), ratio);
    }
  }
  return kExitOk;
}

int cmd_check(std::vector<int> criteria, const pb::CheckOptions& opts) {
  if (criteria.empty()) {
    for (int i = 1; i <= pb::kCheckCount; ++i) criteria.push_back(i);
  }
  bool ok = true;
  for (int id : criteria) {
    const pb::CheckResult res = pb::run_check(id, opts);
    std::cout << pb::format_check_line(res) << std::endl;
    ok = ok && res.passed;
  }
  return ok ? kExitOk : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bandit phase retrieval simulations"};
  app.require_subcommand(1);

  ExperimentArgs sim_args;
  CLI::App* simulate = app.add_subcommand("simulate", "run one experiment configuration and emit CSV");
  add_experiment_options(simulate, sim_args);

  ExperimentArgs sweep_args;
  std::string sweep_axis = "n";
  std::string sweep_metric;
  CLI::App* sweep = app.add_subcommand("sweep", "run a grid along one axis and fit the log-log slope");
  add_experiment_options(sweep, sweep_args);
  sweep->add_option("--axis", sweep_axis, "sweep axis: n or d");
  sweep->add_option("--metric", sweep_metric, "cumulative or simple (default depends on policy)");

  std::vector<int> mom_dims{1, 2, 5, 20};
  std::vector<double> mom_radii{0.5, 1.0};
  double mom_sigma = 1.0;
  std::int64_t mom_samples = 1000000;
  std::uint64_t mom_seed = 1;
  CLI::App* moments = app.add_subcommand("moments", "closed-form moments next to Monte Carlo estimates");
  moments->add_option("--d", mom_dims, "dimensions")->delimiter(',');
  moments->add_option("--r", mom_radii, "radii")->delimiter(',');
  moments->add_option("--sigma", mom_sigma, "noise level");
  moments->add_option("--samples", mom_samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
  moments->add_option("--seed", mom_seed, "base seed");

  std::vector<int> check_ids;
  pb::CheckOptions check_opts;
  CLI::App* check = app.add_subcommand("check", "run the invariant and scaling suites");
  check->add_option("--criteria", check_ids, "suite numbers (default: all)")
      ->delimiter(',')
      ->check(CLI::Range(1, pb::kCheckCount));
  check->add_option("--workers", check_opts.workers, "worker threads")->check(CLI::PositiveNumber);
  check->add_option("--seed", check_opts.seed, "base seed");

  std::string plot_csv, plot_out, plot_axis = "n", plot_metric = "cumulative";
  bool plot_log = false;
  CLI::App* plot = app.add_subcommand("plot", "render a CSV summary as SVG");
  plot->add_option("--csv", plot_csv, "input CSV")->required();
  plot->add_option("--out", plot_out, "output SVG")->required();
  plot->add_option("--axis", plot_axis, "x axis: n or d");
  plot->add_option("--metric", plot_metric, "cumulative or simple");
  plot->add_flag("--log-log", plot_log, "logarithmic axes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(sim_args);
    if (*sweep) return cmd_sweep(sweep_args, sweep_axis, sweep_metric);
    if (*moments) return cmd_moments(mom_dims, mom_radii, mom_sigma, mom_samples, mom_seed);
    if (*check) return cmd_check(check_ids, check_opts);
    if (*plot) {
      pb::emit_plot(plot_csv, parse_axis(plot_axis), plot_out, plot_log,
                    parse_metric(plot_metric).value_or(pb::RegretMetric::cumulative));
      return kExitOk;
    }
  } catch (const pb::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
