#pragma once

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

namespace cli {

struct Result {
  int exit_code;
  std::string out;
};

// Runs a shell command line and captures stdout; stderr is discarded unless
// the command redirects it.
inline Result run(const std::string& command) {
  const std::string full = command + " 2>/dev/null";
  FILE* pipe = ::popen(full.c_str(), "r");
  if (!pipe) return {-1, {}};
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace cli
