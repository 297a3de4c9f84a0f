// checks.hpp
//
// Canned invariant and scaling suites. Each suite is deterministic given its
// seed and reports a single pass/fail verdict with a one-line detail string.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "phase_bandit/harness.hpp"

namespace phase_bandit {

inline constexpr int kCheckCount = 10;

// constant_scale used by the canned regret sweeps of the full policy.
inline constexpr double kSweepScale = 0.05;

struct CheckOptions {
  int workers = 0;
  std::uint64_t seed = 20250101;
};

struct CheckResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

std::string_view check_title(int id);
CheckResult run_check(int id, const CheckOptions& options = {});
// "PASS  3  lemma suite: ... (1.2 s)"
std::string format_check_line(const CheckResult& result);

// Configurations of the canned sweeps, shared with the CLI.
ExperimentConfig regret_in_n_config(std::uint64_t seed);
ExperimentConfig regret_in_d_config(std::uint64_t seed);
ExperimentConfig adaptive_gap_config(PolicyKind policy, std::uint64_t seed);

}  // namespace phase_bandit
