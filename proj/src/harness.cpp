// harness.cpp
#include "phase_bandit/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace phase_bandit {

namespace {

using nlohmann::json;

constexpr std::uint64_t kThetaPurpose = 0x7468657461ULL;   // "theta"
constexpr std::uint64_t kPolicyPurpose = 0x706f6c696379ULL;  // "policy"
constexpr std::uint64_t kPredictPurpose = 0x70726564ULL;   // "pred"

std::string normalize_field(std::string_view field) {
  std::string s(field);
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view text, std::string_view what) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view item = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    if (!item.empty()) out.push_back(parse_number<T>(item, what));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::optional<double> standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return std::nullopt;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double n = static_cast<double>(v.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

WarmStartConfig warm_config(const ExperimentConfig& cfg, const Cell& cell) {
  WarmStartConfig w;
  w.horizon = cell.n;
  w.radius = cell.r;
  w.constant_scale = cfg.constant_scale;
  return w;
}

EtcConfig etc_config(const ExperimentConfig& cfg, const Cell& cell) {
  EtcConfig e;
  e.horizon = cell.n;
  e.radius = cell.r;
  e.constant_scale = cfg.constant_scale;
  return e;
}

}  // namespace

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::full: return "full";
    case PolicyKind::warm_only: return "warm_only";
    case PolicyKind::etc_oracle_warm: return "etc_oracle_warm";
    case PolicyKind::uniform_pure: return "uniform_pure";
    case PolicyKind::radius_probe: return "radius_probe";
  }
  return "unknown";
}

PolicyKind parse_policy(std::string_view name) {
  for (PolicyKind k : {PolicyKind::full, PolicyKind::warm_only, PolicyKind::etc_oracle_warm,
                       PolicyKind::uniform_pure, PolicyKind::radius_probe}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

double RadiusMode::resolve(int d, std::int64_t n) const {
  switch (kind) {
    case Kind::fixed: return value;
    case Kind::lower_bound_cumulative: return lower_bound_radius(d, n, LowerBoundKind::cumulative);
    case Kind::lower_bound_simple: return lower_bound_radius(d, n, LowerBoundKind::simple);
  }
  return value;
}

std::string RadiusMode::to_string() const {
  switch (kind) {
    case Kind::fixed: {
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
      return "fixed:" + std::string(buf, ptr);
    }
    case Kind::lower_bound_cumulative: return "lower_bound_cumulative";
    case Kind::lower_bound_simple: return "lower_bound_simple";
  }
  return {};
}

RadiusMode RadiusMode::parse(std::string_view text) {
  if (text == "lower_bound_cumulative") return {Kind::lower_bound_cumulative, 0.0};
  if (text == "lower_bound_simple") return {Kind::lower_bound_simple, 0.0};
  if (text.starts_with("fixed:")) return {Kind::fixed, parse_number<double>(text.substr(6), "r_mode radius")};
  throw ConfigError("r_mode must be 'fixed:<r>', 'lower_bound_cumulative' or 'lower_bound_simple', got '" +
                    std::string(text) + "'");
}

void ExperimentConfig::validate() const {
  if (d_grid.empty()) throw ConfigError("d_grid must not be empty");
  if (n_grid.empty()) throw ConfigError("n_grid must not be empty");
  for (int d : d_grid) {
    if (d < 1) throw ConfigError("d_grid entries must be >= 1");
  }
  for (std::int64_t n : n_grid) {
    if (n < 1) throw ConfigError("n_grid entries must be >= 1");
  }
  if (seeds < 1) throw ConfigError("seeds must be >= 1");
  if (r_mode.kind == RadiusMode::Kind::fixed && !(r_mode.value > 0.0 && r_mode.value <= 1.0)) {
    throw ConfigError("fixed radius must lie in (0, 1]");
  }
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be >= 0");
  if (!(constant_scale > 0.0)) throw ConfigError("constant_scale must be > 0");
}

ExperimentConfig parse_config_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig cfg;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "policy") cfg.policy = parse_policy(value.get<std::string>());
      else if (key == "d_grid") cfg.d_grid = value.get<std::vector<int>>();
      else if (key == "n_grid") cfg.n_grid = value.get<std::vector<std::int64_t>>();
      else if (key == "r_mode") cfg.r_mode = RadiusMode::parse(value.get<std::string>());
      else if (key == "noise_sigma") cfg.noise_sigma = value.get<double>();
      else if (key == "constant_scale") cfg.constant_scale = value.get<double>();
      else if (key == "seeds") cfg.seeds = value.get<int>();
      else if (key == "base_seed") cfg.base_seed = value.get<std::uint64_t>();
      else if (key == "output_path") cfg.output_path = value.get<std::string>();
      else throw ConfigError("unknown config field '" + key + "'");
    }
  } catch (const json::type_error& e) {
    throw ConfigError(std::string("wrong value type: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json doc = {
      {"policy", std::string(to_string(cfg.policy))},
      {"d_grid", cfg.d_grid},
      {"n_grid", cfg.n_grid},
      {"r_mode", cfg.r_mode.to_string()},
      {"noise_sigma", cfg.noise_sigma},
      {"constant_scale", cfg.constant_scale},
      {"seeds", cfg.seeds},
      {"base_seed", cfg.base_seed},
      {"output_path", cfg.output_path},
  };
  return doc.dump(2);
}

void apply_config_override(ExperimentConfig& cfg, std::string_view field, std::string_view value) {
  const std::string key = normalize_field(field);
  if (key == "policy") cfg.policy = parse_policy(value);
  else if (key == "d_grid") cfg.d_grid = parse_list<int>(value, "d_grid");
  else if (key == "n_grid") cfg.n_grid = parse_list<std::int64_t>(value, "n_grid");
  else if (key == "r_mode") cfg.r_mode = RadiusMode::parse(value);
  else if (key == "noise_sigma") cfg.noise_sigma = parse_number<double>(value, "noise_sigma");
  else if (key == "constant_scale") cfg.constant_scale = parse_number<double>(value, "constant_scale");
  else if (key == "seeds") cfg.seeds = parse_number<int>(value, "seeds");
  else if (key == "base_seed") cfg.base_seed = parse_number<std::uint64_t>(value, "base_seed");
  else if (key == "output_path") cfg.output_path = std::string(value);
  else throw ConfigError("unknown config field '" + key + "'");
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PHASE_BANDIT_WORKERS")) {
    int n = 0;
    const std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec == std::errc() && ptr == s.data() + s.size() && n > 0) return n;
    throw ConfigError("PHASE_BANDIT_WORKERS must be a positive integer, got '" + std::string(s) + "'");
  }
  return std::max(1, omp_get_num_procs());
}

SeedMetrics run_single(const ExperimentConfig& cfg, const Cell& cell, int seed_index, bool fixed_theta) {
  const auto d = static_cast<std::uint64_t>(cell.d);
  const auto n = static_cast<std::uint64_t>(cell.n);
  const auto s = static_cast<std::uint64_t>(seed_index);

  Rng theta_rng(RngState{cfg.base_seed, stream_key({d, n, s, kThetaPurpose})});
  const Environment env = fixed_theta ? Environment(cell.r * Vector::Unit(cell.d, 0), cfg.noise_sigma)
                                      : Environment::on_sphere(cell.d, cell.r, theta_rng, cfg.noise_sigma);
  const RngState policy_stream{cfg.base_seed, stream_key({d, n, s, kPolicyPurpose})};

  PolicyOutcome outcome = [&] {
    switch (cell.policy) {
      case PolicyKind::full:
        return full_policy_run(env, cell.n, warm_config(cfg, cell), etc_config(cfg, cell), policy_stream);
      case PolicyKind::warm_only: return warm_start_run(env, warm_config(cfg, cell), policy_stream);
      case PolicyKind::etc_oracle_warm: {
        const Action oracle(env.theta_star() / env.radius());
        return etc_run(env, oracle, etc_config(cfg, cell), cell.n, policy_stream);
      }
      case PolicyKind::uniform_pure: return uniform_pure_exploration_run(env, cell.n, policy_stream);
      case PolicyKind::radius_probe:
        return radius_probe_run(env, cell.n, warm_config(cfg, cell), etc_config(cfg, cell), policy_stream);
    }
    throw ConfigError("unhandled policy");
  }();

  const auto played = static_cast<std::int64_t>(outcome.trajectory.size());
  if (played > cell.n) throw ContractViolation("run exceeded its horizon");

  SeedMetrics m;
  m.rounds_played = played;
  m.cumulative_regret = cumulative_regret(env, outcome.trajectory);
  if (!outcome.trajectory.empty()) {
    Rng predict_rng(RngState{cfg.base_seed, stream_key({d, n, s, kPredictPurpose})});
    m.simple_regret = simple_regret(env, predict_from_trajectory(outcome.trajectory, PredictMode::committed,
                                                                 predict_rng));
  } else {
    m.simple_regret = cell.r * cell.r;
  }
  if (outcome.trajectory.warm_output) {
    const WarmOutput& w = *outcome.trajectory.warm_output;
    m.warm_rounds = static_cast<double>(w.rounds);
    m.warm_success = w.halted && warm_succeeded(env, w);
  }
  return m;
}

RegretSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  RegretSummary summary;

  std::vector<Cell> cells;
  std::vector<int> sorted_d = cfg.d_grid;
  std::vector<std::int64_t> sorted_n = cfg.n_grid;
  std::sort(sorted_d.begin(), sorted_d.end());
  sorted_d.erase(std::unique(sorted_d.begin(), sorted_d.end()), sorted_d.end());
  std::sort(sorted_n.begin(), sorted_n.end());
  sorted_n.erase(std::unique(sorted_n.begin(), sorted_n.end()), sorted_n.end());
  for (int d : sorted_d) {
    for (std::int64_t n : sorted_n) {
      try {
        cells.push_back(Cell{cfg.policy, d, n, cfg.r_mode.resolve(d, n)});
      } catch (const InfeasibleRadius& e) {
        summary.warnings.push_back("skipping cell d=" + std::to_string(d) + " n=" + std::to_string(n) + ": " +
                                   e.what());
      }
    }
  }

  const auto seeds = static_cast<std::size_t>(cfg.seeds);
  const std::size_t tasks = cells.size() * seeds;
  std::vector<SeedMetrics> results(tasks);
  std::vector<std::exception_ptr> errors(tasks);
  const int workers = resolve_workers(options.workers);

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(tasks); ++t) {
    const Cell& cell = cells[static_cast<std::size_t>(t) / seeds];
    const int seed = static_cast<int>(static_cast<std::size_t>(t) % seeds);
    try {
      results[t] = options.runner ? options.runner(cell, seed) : run_single(cfg, cell, seed, options.fixed_theta);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<double> cum, simple, rounds, success;
    for (std::size_t s = 0; s < seeds; ++s) {
      const SeedMetrics& m = results[c * seeds + s];
      cum.push_back(m.cumulative_regret);
      simple.push_back(m.simple_regret);
      if (m.warm_rounds) rounds.push_back(*m.warm_rounds);
      if (m.warm_success) success.push_back(*m.warm_success ? 1.0 : 0.0);
    }
    CellSummary row;
    row.policy = std::string(to_string(cells[c].policy));
    row.d = cells[c].d;
    row.n = cells[c].n;
    row.r = cells[c].r;
    row.sigma = cfg.noise_sigma;
    row.scale = cfg.constant_scale;
    row.seeds = cfg.seeds;
    row.mean_cum_regret = mean_of(cum);
    row.se_cum_regret = standard_error(cum);
    row.mean_simple_regret = mean_of(simple);
    row.se_simple_regret = standard_error(simple);
    if (rounds.size() == seeds) row.mean_warm_rounds = mean_of(rounds);
    if (success.size() == seeds) row.warm_success_rate = mean_of(success);
    summary.cells.push_back(std::move(row));
  }
  return summary;
}

RegretMetric default_metric(PolicyKind policy) {
  return policy == PolicyKind::uniform_pure ? RegretMetric::simple : RegretMetric::cumulative;
}

ScalingFit fit_summary(const RegretSummary& summary, SweepAxis axis, RegretMetric metric) {
  std::map<std::string, int> policies;
  std::map<double, int> others;
  std::vector<std::pair<double, double>> points;
  for (const auto& c : summary.cells) {
    policies[c.policy] = 1;
    others[axis == SweepAxis::n ? static_cast<double>(c.d) : static_cast<double>(c.n)] = 1;
    const double x = axis == SweepAxis::n ? static_cast<double>(c.n) : static_cast<double>(c.d);
    const double y = metric == RegretMetric::cumulative ? c.mean_cum_regret : c.mean_simple_regret;
    points.emplace_back(x, y);
  }
  if (policies.size() > 1) throw InvalidArgument("scaling fit needs a single policy");
  if (others.size() > 1) throw InvalidArgument("scaling fit needs the other axis fixed to one value");
  if (points.size() < 3) throw InvalidArgument("scaling fit needs at least 3 grid points");
  return fit_scaling_exponent(points);
}

ScalingFit sweep_and_fit(const ExperimentConfig& cfg, SweepAxis axis, const RunOptions& options,
                         std::optional<RegretMetric> metric) {
  const std::size_t points = axis == SweepAxis::n ? cfg.n_grid.size() : cfg.d_grid.size();
  if (points < 3) throw ConfigError("sweep axis needs at least 3 grid points");
  const RegretSummary summary = run_experiment(cfg, options);
  return fit_summary(summary, axis, metric.value_or(default_metric(cfg.policy)));
}

}  // namespace phase_bandit
