// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <cstdio>
#include <cstdlib>
#include <string>

#include "isoprofile/core/parallel.hpp"
#include "isoprofile/selftest/acceptance.hpp"

int main(int argc, char** argv) {
  isoprofile::selftest::AcceptanceOptions options;
  options.workers = isoprofile::default_workers();
  for (int i = 1; i < argc; ++i) options.only.push_back(std::atoi(argv[i]));
  int failed = 0;
  isoprofile::selftest::run_acceptance(options, [&](const auto& r) {
    std::printf("%s\n", isoprofile::selftest::format_line(r).c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
  });
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
