#include "vidiag/media/subprocess.h"

#include <array>
#include <cstdio>

#include <sys/wait.h>

namespace vidiag::media {

CommandResult run_command(const std::string& command_line) {
  CommandResult result;
  const std::string full = command_line + " 2>&1";
  FILE* pipe = ::popen(full.c_str(), "r");
  if (pipe == nullptr) {
    result.launch_failed = true;
    return result;
  }
  std::array<char, 4096> buf{};
  size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    result.output.append(buf.data(), n);
  }
  const int status = ::pclose(pipe);
  if (status == -1) {
    result.launch_failed = true;
    return result;
  }
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  }
  // 127: shell could not find the binary; 126: found but not executable.
  result.binary_missing = result.exit_code == 127 || result.exit_code == 126;
  return result;
}

}  // namespace vidiag::media
