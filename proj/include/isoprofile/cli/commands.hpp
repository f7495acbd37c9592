#pragma once

#include <exception>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "isoprofile/cli/config.hpp"
#include "isoprofile/core/error.hpp"

namespace isoprofile::cli {

struct CommandResult {
  nlohmann::ordered_json json;
  /// (file name, contents) written under the --out directory.
  std::vector<std::pair<std::string, std::string>> files;
  /// Text printed instead of the JSON (selftest lines).
  std::string text;
  int exit_code = 0;
};

CommandResult run_pseudoball(const RunConfig& config);
CommandResult run_expand(const RunConfig& config);
CommandResult run_profile(const RunConfig& config);
CommandResult run_partition(const RunConfig& config);
/// Streams one line per criterion to `progress`; exit code 1 if any fail.
CommandResult run_selftest(const RunConfig& config, std::ostream& progress);

/// 3 for solver non-convergence, 2 for every other library error.
int exit_code_for(ErrorKind kind);

/// {"error":{"kind":...,"message":...[,"position":...]}} on one line.
std::string error_line(const std::exception& e);
std::string error_line(std::string_view kind, const std::string& message);

/// Validates, dispatches and emits. JSON goes to `out`, errors to `err`.
int run(const std::string& command, const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace isoprofile::cli
