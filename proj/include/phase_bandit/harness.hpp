// harness.hpp
//
// Seeded experiment sweeps over (policy, d, n, r), CSV/SVG emission and the
// JSON configuration format used by the CLI.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phase_bandit/analysis.hpp"
#include "phase_bandit/policies.hpp"

namespace phase_bandit {

enum class PolicyKind { full, warm_only, etc_oracle_warm, uniform_pure, radius_probe };

std::string_view to_string(PolicyKind kind);
PolicyKind parse_policy(std::string_view name);

struct RadiusMode {
  enum class Kind { fixed, lower_bound_cumulative, lower_bound_simple };
  Kind kind = Kind::fixed;
  double value = 1.0;  // used by Kind::fixed

  // Throws InfeasibleRadius for lower-bound kinds when the construction
  // needs r > 1.
  double resolve(int d, std::int64_t n) const;
  std::string to_string() const;
  static RadiusMode parse(std::string_view text);  // "fixed:<r>" or a kind name
};

struct ExperimentConfig {
  PolicyKind policy = PolicyKind::full;
  std::vector<int> d_grid{5};
  std::vector<std::int64_t> n_grid{4096};
  RadiusMode r_mode{};
  double noise_sigma = 1.0;
  double constant_scale = 1.0;
  int seeds = 1;
  std::uint64_t base_seed = 0;
  std::string output_path;

  void validate() const;  // throws ConfigError
};

// Flat JSON object with exactly the ExperimentConfig field names; unknown
// fields are rejected with ConfigError.
ExperimentConfig parse_config_json(std::string_view text);
ExperimentConfig load_config_file(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);
// Applies a single "field=value" style override; `field` uses underscores or
// hyphens interchangeably.
void apply_config_override(ExperimentConfig& cfg, std::string_view field, std::string_view value);

struct Cell {
  PolicyKind policy;
  int d;
  std::int64_t n;
  double r;
};

struct SeedMetrics {
  double cumulative_regret = 0.0;
  double simple_regret = 0.0;
  std::optional<double> warm_rounds;
  std::optional<bool> warm_success;
  std::int64_t rounds_played = 0;
};

struct RunOptions {
  int workers = 0;             // 0: PHASE_BANDIT_WORKERS, else available parallelism
  bool fixed_theta = false;    // theta* = r e_1 instead of a uniform draw
  // Replaces the policy call (tests inject synthetic metrics through this).
  std::function<SeedMetrics(const Cell&, int seed_index)> runner;
};

int resolve_workers(int requested);

struct CellSummary {
  std::string policy;
  int d = 0;
  std::int64_t n = 0;
  double r = 0.0;
  double sigma = 0.0;
  double scale = 0.0;
  int seeds = 0;
  double mean_cum_regret = 0.0;
  std::optional<double> se_cum_regret;
  double mean_simple_regret = 0.0;
  std::optional<double> se_simple_regret;
  std::optional<double> mean_warm_rounds;
  std::optional<double> warm_success_rate;

  friend bool operator==(const CellSummary&, const CellSummary&) = default;
};

struct RegretSummary {
  std::vector<CellSummary> cells;  // sorted by (policy, d, n)
  std::vector<std::string> warnings;
};

// Runs one seed of one cell with the configured policy.
SeedMetrics run_single(const ExperimentConfig& cfg, const Cell& cell, int seed_index, bool fixed_theta = false);

RegretSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

enum class SweepAxis { n, d };
enum class RegretMetric { cumulative, simple };

// Fits log(mean metric) against log(axis value). The other axis must be a
// single value and the chosen axis needs at least three cells.
ScalingFit fit_summary(const RegretSummary& summary, SweepAxis axis, RegretMetric metric);
ScalingFit sweep_and_fit(const ExperimentConfig& cfg, SweepAxis axis, const RunOptions& options = {},
                         std::optional<RegretMetric> metric = std::nullopt);
RegretMetric default_metric(PolicyKind policy);

inline constexpr std::string_view kCsvHeader =
    "policy,d,n,r,sigma,scale,seeds,mean_cum_regret,se_cum_regret,mean_simple_regret,se_simple_regret,"
    "mean_warm_rounds,warm_success_rate";

std::string format_csv(const RegretSummary& summary);
RegretSummary parse_csv(std::string_view text);  // throws ParseError naming the line
void emit_csv(const RegretSummary& summary, const std::string& path);
RegretSummary read_csv_file(const std::string& path);

std::string render_svg(const RegretSummary& summary, SweepAxis x_axis, bool log_log,
                       RegretMetric metric = RegretMetric::cumulative);
void emit_plot(const std::string& csv_path, SweepAxis x_axis, const std::string& out_path, bool log_log,
               RegretMetric metric = RegretMetric::cumulative);

}  // namespace phase_bandit
