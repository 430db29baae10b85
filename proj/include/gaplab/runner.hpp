#pragma once

#include <string>
#include <vector>

namespace gaplab {

inline constexpr const char* kToolVersion = "0.1.0";

/// Result of one command run. JSON is always produced; CSV only for commands
/// with a tabular form. Both texts embed the tool version, the effective
/// config (defaults filled in), the seed and the tolerances used, so a saved
/// output is self-describing.
struct RunOutput {
  std::string json_text;
  std::string csv_text;
  std::string summary;  // short human-readable report for stdout
  int exit_code = 0;    // 0 ok, 1 acceptance failure, 2 bad config, 3 solver failure
};

/// Executes a named command with a JSON config object. Never throws: config
/// problems come back as exit 2, solver failures as exit 3, with the message
/// in `summary`. Identical command + config (including seed) produces
/// byte-identical json_text and csv_text.
RunOutput run_command(const std::string& command, const std::string& config_json);

/// The accepted command names, in listing order.
std::vector<std::string> command_names();

}  // namespace gaplab
