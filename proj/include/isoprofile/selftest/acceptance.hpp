#pragma once

#include <functional>
#include <string>
#include <vector>

namespace isoprofile::selftest {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // measured values against their thresholds
  double seconds = 0.0;
};

struct AcceptanceOptions {
  int workers = 1;
  std::vector<int> only;  // empty: all twelve
};

inline constexpr int kCriterionCount = 12;

/// Runs the acceptance criteria in order. Each criterion that throws is
/// reported as failed with the error message.
std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& options = {},
    const std::function<void(const CriterionResult&)>& on_result = {});

/// "criterion  3 PASS  <name> | <detail>"
std::string format_line(const CriterionResult& result);

}  // namespace isoprofile::selftest
