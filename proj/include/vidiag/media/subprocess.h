#pragma once

#include <string>

namespace vidiag::media {

struct CommandResult {
  int exit_code = -1;
  std::string output;        // stdout + stderr interleaved
  bool binary_missing = false;
  bool launch_failed = false;
};

/// Runs a shell command capturing combined output. Exit code 127 is
/// reported as a missing binary rather than a tool error.
CommandResult run_command(const std::string& command_line);

}  // namespace vidiag::media
