#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "phase_bandit/harness.hpp"

using namespace phase_bandit;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("phase_bandit_test_" + name)).string();
}

ExperimentConfig small_config(PolicyKind policy) {
  ExperimentConfig cfg;
  cfg.policy = policy;
  cfg.d_grid = {2, 3};
  cfg.n_grid = {300, 600};
  cfg.seeds = 3;
  cfg.constant_scale = 0.05;
  cfg.base_seed = 7;
  return cfg;
}

// Golden fixture configuration; regenerate the fixture with
//   phase_bandit simulate --policy full --d-grid 2,3 --n-grid 300,600 --seeds 3 \
//     --constant-scale 0.05 --base-seed 7
ExperimentConfig golden_config() { return small_config(PolicyKind::full); }

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("json round trip") {
    ExperimentConfig cfg = small_config(PolicyKind::uniform_pure);
    cfg.r_mode = RadiusMode{RadiusMode::Kind::fixed, 0.625};
    cfg.output_path = "out.csv";
    cfg.base_seed = 18446744073709551615ULL;
    const ExperimentConfig back = parse_config_json(config_to_json(cfg));
    CHECK(config_to_json(back) == config_to_json(cfg));
    CHECK(back.base_seed == cfg.base_seed);
    CHECK(back.r_mode.value == 0.625);
  }

  TEST_CASE("unknown fields and bad values are rejected") {
    CHECK_THROWS_AS(parse_config_json(R"({"policy": "full", "colour": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config_json(R"({"policy": "greedy"})"), ConfigError);
    CHECK_THROWS_AS(parse_config_json(R"({"d_grid": []})"), ConfigError);
    CHECK_THROWS_AS(parse_config_json(R"({"seeds": 0})"), ConfigError);
    CHECK_THROWS_AS(parse_config_json(R"({"seeds": "many"})"), ConfigError);
    CHECK_THROWS_AS(parse_config_json(R"({"r_mode": "fixed:1.5"})"), ConfigError);
    CHECK_THROWS_AS(parse_config_json(R"([1, 2])"), ConfigError);
    CHECK_THROWS_AS(parse_config_json("{"), ConfigError);
    CHECK_THROWS_AS(load_config_file(temp_path("does_not_exist.json")), ConfigError);
  }

  TEST_CASE("flag overrides use hyphenated names") {
    ExperimentConfig cfg;
    apply_config_override(cfg, "d-grid", "4,8,16");
    apply_config_override(cfg, "n_grid", "100");
    apply_config_override(cfg, "r-mode", "lower_bound_simple");
    apply_config_override(cfg, "constant-scale", "0.1");
    apply_config_override(cfg, "base-seed", "99");
    CHECK(cfg.d_grid == std::vector<int>{4, 8, 16});
    CHECK(cfg.n_grid == std::vector<std::int64_t>{100});
    CHECK(cfg.r_mode.kind == RadiusMode::Kind::lower_bound_simple);
    CHECK(cfg.constant_scale == 0.1);
    CHECK(cfg.base_seed == 99);
    CHECK_THROWS_AS(apply_config_override(cfg, "nope", "1"), ConfigError);
    CHECK_THROWS_AS(apply_config_override(cfg, "seeds", "3x"), ConfigError);
  }

  TEST_CASE("worker resolution") {
    CHECK(resolve_workers(3) == 3);
    setenv("PHASE_BANDIT_WORKERS", "5", 1);
    CHECK(resolve_workers(0) == 5);
    CHECK(resolve_workers(2) == 2);
    setenv("PHASE_BANDIT_WORKERS", "zero", 1);
    CHECK_THROWS_AS(resolve_workers(0), ConfigError);
    unsetenv("PHASE_BANDIT_WORKERS");
    CHECK(resolve_workers(0) >= 1);
  }

  TEST_CASE("radius modes") {
    CHECK(RadiusMode::parse("fixed:0.5").resolve(3, 100) == 0.5);
    CHECK(RadiusMode::parse("lower_bound_simple").resolve(8, 4096) == doctest::Approx(0.25));
    CHECK_THROWS_AS(RadiusMode::parse("lower_bound_simple").resolve(8, 8), InfeasibleRadius);
    CHECK(RadiusMode::parse("fixed:0.5").to_string() == "fixed:0.5");
  }
}

TEST_SUITE("runner") {
  TEST_CASE("repeat runs give byte-identical CSV") {
    const ExperimentConfig cfg = small_config(PolicyKind::full);
    RunOptions one, many;
    one.workers = 1;
    many.workers = 4;
    const std::string a = format_csv(run_experiment(cfg, one));
    CHECK(a == format_csv(run_experiment(cfg, one)));
    CHECK(a == format_csv(run_experiment(cfg, many)));
  }

  TEST_CASE("aggregation is independent of execution order") {
    ExperimentConfig cfg = small_config(PolicyKind::warm_only);
    RunOptions seq;
    seq.workers = 1;
    const RegretSummary s = run_experiment(cfg, seq);
    RunOptions par;
    par.workers = 3;
    const RegretSummary p = run_experiment(cfg, par);
    CHECK(s.cells == p.cells);
  }

  TEST_CASE("budget is never exceeded") {
    for (PolicyKind kind : {PolicyKind::full, PolicyKind::warm_only, PolicyKind::etc_oracle_warm,
                            PolicyKind::uniform_pure, PolicyKind::radius_probe}) {
      const ExperimentConfig cfg = small_config(kind);
      for (int seed = 0; seed < 3; ++seed) {
        const SeedMetrics m = run_single(cfg, Cell{kind, 3, 300, 1.0}, seed);
        CHECK(m.rounds_played <= 300);
        if (kind != PolicyKind::warm_only) CHECK(m.rounds_played == 300);
      }
    }
  }

  TEST_CASE("noiseless uniform exploration recovers the direction") {
    ExperimentConfig cfg = small_config(PolicyKind::uniform_pure);
    cfg.d_grid = {2};
    cfg.n_grid = {100};
    cfg.noise_sigma = 0.0;
    cfg.seeds = 10;
    const RegretSummary s = run_experiment(cfg);
    CHECK(s.cells.at(0).mean_simple_regret < 1e-3);
  }

  TEST_CASE("oracle warm start dominates the full policy") {
    ExperimentConfig cfg = small_config(PolicyKind::full);
    cfg.d_grid = {5};
    cfg.n_grid = {8192};
    cfg.seeds = 20;
    const double full = run_experiment(cfg).cells.at(0).mean_cum_regret;
    cfg.policy = PolicyKind::etc_oracle_warm;
    const double oracle = run_experiment(cfg).cells.at(0).mean_cum_regret;
    CHECK(oracle <= full);
  }

  TEST_CASE("standard errors need two seeds") {
    ExperimentConfig cfg = small_config(PolicyKind::full);
    cfg.seeds = 1;
    const RegretSummary s = run_experiment(cfg);
    for (const auto& c : s.cells) {
      CHECK_FALSE(c.se_cum_regret);
      CHECK_FALSE(c.se_simple_regret);
      CHECK(c.mean_warm_rounds);
    }
    cfg.policy = PolicyKind::uniform_pure;
    for (const auto& c : run_experiment(cfg).cells) CHECK_FALSE(c.mean_warm_rounds);
  }

  TEST_CASE("infeasible lower-bound cells are skipped with a warning") {
    ExperimentConfig cfg = small_config(PolicyKind::uniform_pure);
    cfg.d_grid = {8};
    cfg.n_grid = {8, 4096};
    cfg.r_mode = RadiusMode{RadiusMode::Kind::lower_bound_simple, 0.0};
    cfg.seeds = 2;
    const RegretSummary s = run_experiment(cfg);
    CHECK(s.cells.size() == 1);
    CHECK(s.cells[0].n == 4096);
    CHECK(s.warnings.size() == 1);
  }

  TEST_CASE("fixed theta mode") {
    ExperimentConfig cfg = small_config(PolicyKind::warm_only);
    const SeedMetrics a = run_single(cfg, Cell{PolicyKind::warm_only, 3, 600, 1.0}, 0, true);
    const SeedMetrics b = run_single(cfg, Cell{PolicyKind::warm_only, 3, 600, 1.0}, 1, true);
    CHECK(a.warm_rounds);
    CHECK(b.warm_rounds);
  }
}

TEST_SUITE("scaling fits") {
  TEST_CASE("stubbed regret d * sqrt(n) recovers both exponents") {
    ExperimentConfig cfg = small_config(PolicyKind::full);
    RunOptions opts;
    opts.runner = [](const Cell& c, int) {
      SeedMetrics m;
      m.cumulative_regret = c.d * std::sqrt(static_cast<double>(c.n));
      m.simple_regret = 1.0 / std::sqrt(static_cast<double>(c.n));
      return m;
    };
    cfg.d_grid = {5};
    cfg.n_grid = {1000, 4000, 16000, 64000};
    CHECK(sweep_and_fit(cfg, SweepAxis::n, opts).slope == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sweep_and_fit(cfg, SweepAxis::n, opts, RegretMetric::simple).slope == doctest::Approx(-0.5).epsilon(1e-12));
    cfg.d_grid = {2, 4, 8, 16};
    cfg.n_grid = {1000};
    CHECK(sweep_and_fit(cfg, SweepAxis::d, opts).slope == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("fit preconditions") {
    ExperimentConfig cfg = small_config(PolicyKind::full);
    RunOptions opts;
    opts.runner = [](const Cell&, int) { return SeedMetrics{1.0, 1.0, {}, {}, 1}; };
    CHECK_THROWS_AS(sweep_and_fit(cfg, SweepAxis::n, opts), ConfigError);
    cfg.n_grid = {10, 20, 40};
    CHECK_THROWS_AS(sweep_and_fit(cfg, SweepAxis::n, opts), InvalidArgument);
    RegretSummary two;
    two.cells.resize(2);
    CHECK_THROWS_AS(fit_summary(two, SweepAxis::n, RegretMetric::cumulative), InvalidArgument);
  }

  TEST_CASE("uniform exploration simple regret decays with n") {
    ExperimentConfig cfg = small_config(PolicyKind::uniform_pure);
    cfg.d_grid = {3};
    cfg.n_grid = {500, 2000, 8000};
    cfg.seeds = 30;
    const ScalingFit fit = sweep_and_fit(cfg, SweepAxis::n);
    CHECK(fit.slope < -0.3);
    CHECK(fit.slope > -1.2);
  }
}

TEST_SUITE("csv") {
  TEST_CASE("empty summary is header only") {
    CHECK(format_csv(RegretSummary{}) == std::string(kCsvHeader) + "\n");
  }

  TEST_CASE("one cell gives two lines and parses back exactly") {
    RegretSummary s;
    CellSummary c;
    c.policy = "full";
    c.d = 5;
    c.n = 4096;
    c.r = 1.0 / 3.0;
    c.sigma = 1;
    c.scale = 0.05;
    c.seeds = 7;
    c.mean_cum_regret = 1234.5678901234567;
    c.se_cum_regret = 0.1 + 0.2;
    c.mean_simple_regret = 1e-300;
    c.mean_warm_rounds = 613.25;
    s.cells.push_back(c);
    const std::string text = format_csv(s);
    CHECK(count(text, "\n") == 2);
    CHECK(text.find('\r') == std::string::npos);
    const RegretSummary back = parse_csv(text);
    CHECK(back.cells == s.cells);
    CHECK(format_csv(back) == text);
  }

  TEST_CASE("rows are sorted by policy, d, n") {
    RegretSummary s;
    for (const char* p : {"warm_only", "full"}) {
      for (int d : {8, 2}) {
        for (std::int64_t n : {400, 100}) {
          CellSummary c;
          c.policy = p;
          c.d = d;
          c.n = n;
          s.cells.push_back(c);
        }
      }
    }
    const RegretSummary back = parse_csv(format_csv(s));
    REQUIRE(back.cells.size() == 8);
    CHECK(back.cells[0].policy == "full");
    CHECK(back.cells[0].d == 2);
    CHECK(back.cells[0].n == 100);
    CHECK(back.cells[1].n == 400);
    CHECK(back.cells[7].policy == "warm_only");
    CHECK(back.cells[7].d == 8);
  }

  TEST_CASE("experiment output round-trips") {
    const RegretSummary s = run_experiment(small_config(PolicyKind::full));
    const std::string path = temp_path("roundtrip.csv");
    emit_csv(s, path);
    CHECK(read_csv_file(path).cells == s.cells);
    std::remove(path.c_str());
  }

  TEST_CASE("golden fixture") {
    const std::string expected = read_file(std::string(PHASE_BANDIT_FIXTURE_DIR) + "/golden_summary.csv");
    REQUIRE(!expected.empty());
    RunOptions opts;
    opts.workers = 2;
    CHECK(format_csv(run_experiment(golden_config(), opts)) == expected);
  }

  TEST_CASE("malformed input names the line") {
    const std::string header(kCsvHeader);
    auto message = [](const std::string& text) {
      try {
        parse_csv(text);
      } catch (const ParseError& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(message("policy,d\n").find("line 1") != std::string::npos);
    CHECK(message(header + "\nfull,5,100,1,1,1,2,3,,4,,,\nfull,x,100,1,1,1,2,3,,4,,,\n").find("line 3") !=
          std::string::npos);
    CHECK(message(header + "\nfull,5,100\n").find("line 2") != std::string::npos);
    CHECK(message("").find("line 1") != std::string::npos);
  }

  TEST_CASE("unwritable path names the path") {
    const std::string path = "/nonexistent_dir_phase_bandit/out.csv";
    try {
      emit_csv(RegretSummary{}, path);
      FAIL("expected an IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find(path) != std::string::npos);
    }
  }
}

TEST_SUITE("svg") {
  TEST_CASE("header-only CSV gives axes and legend without polylines") {
    const std::string svg = render_svg(RegretSummary{}, SweepAxis::n, true);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("class=\"axes\"") != std::string::npos);
    CHECK(svg.find("class=\"legend\"") != std::string::npos);
    CHECK(count(svg, "<polyline") == 0);
  }

  TEST_CASE("one polyline and legend entry per policy") {
    RegretSummary s;
    for (const char* p : {"full", "uniform_pure", "warm_only"}) {
      for (std::int64_t n : {100, 1000, 10000}) {
        CellSummary c;
        c.policy = p;
        c.d = 4;
        c.n = n;
        c.mean_cum_regret = std::sqrt(static_cast<double>(n)) * (p[0] == 'f' ? 1 : 2);
        c.se_cum_regret = 1.0;
        s.cells.push_back(c);
      }
    }
    const std::string csv = temp_path("plot.csv");
    const std::string out1 = temp_path("plot1.svg");
    const std::string out2 = temp_path("plot2.svg");
    emit_csv(s, csv);
    emit_plot(csv, SweepAxis::n, out1, true);
    emit_plot(csv, SweepAxis::n, out2, true);
    const std::string svg = read_file(out1);
    CHECK(svg == read_file(out2));
    CHECK(count(svg, "<polyline") == 3);
    CHECK(count(svg, "class=\"errorbar\"") == 9);
    CHECK(count(svg, "class=\"legend-entry\"") == 3);
    for (const char* p : {"full", "uniform_pure", "warm_only"}) {
      CHECK(svg.find(std::string(">") + p + "</text>") != std::string::npos);
    }
    for (const auto& f : {csv, out1, out2}) std::remove(f.c_str());
  }

  TEST_CASE("malformed CSV is reported") {
    const std::string csv = temp_path("bad.csv");
    {
      std::ofstream out(csv);
      out << kCsvHeader << "\nfull,5\n";
    }
    CHECK_THROWS_AS(emit_plot(csv, SweepAxis::n, temp_path("bad.svg"), false), ParseError);
    std::remove(csv.c_str());
  }
}
