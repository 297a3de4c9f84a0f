// Runs every invariant and scaling suite and prints one PASS/FAIL line each.
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "phase_bandit/checks.hpp"

int main(int argc, char** argv) {
  phase_bandit::CheckOptions opts;
  if (argc > 1) opts.workers = std::atoi(argv[1]);
  int failed = 0;
  for (int id = 1; id <= phase_bandit::kCheckCount; ++id) {
    const phase_bandit::CheckResult res = phase_bandit::run_check(id, opts);
    std::cout << phase_bandit::format_check_line(res) << std::endl;
    if (!res.passed) ++failed;
  }
  std::cout << (phase_bandit::kCheckCount - failed) << "/" << phase_bandit::kCheckCount << " criteria passed"
            << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
