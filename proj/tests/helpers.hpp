#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnet/topology.hpp"

namespace testutil {

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

// Runs a shell command capturing stdout; append "2>&1" to capture stderr too.
inline CommandResult run_command(const std::string& command) {
  CommandResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) {
    throw std::runtime_error("popen failed for: " + command);
  }
  std::array<char, 4096> buffer;
  std::size_t n;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    result.output.append(buffer.data(), n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

#ifdef QNET_CLI_PATH
inline std::string cli_path() { return QNET_CLI_PATH; }
#endif

// Self-cleaning scratch directory for file-based tests.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("qnetflow_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name, const std::string& content) const {
    const auto full = path_ / name;
    std::ofstream out(full, std::ios::binary);
    out << content;
    return full.string();
  }
  std::string path(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

// Line A - B - C with capacities 10 and 6; the canonical shared-bottleneck
// fixture.
inline qnet::Network make_line_abc() {
  return qnet::Network({{0}, {1}, {2}},
                       {{0, 1, 10.0, 0.98}, {1, 2, 6.0, 0.98}});
}

// Star of three hosts (0, 1, 2) around repeater-capable hub 3, all links
// capacity 6.
inline qnet::Network make_star3(double capacity = 6.0, double fidelity = 0.98) {
  return qnet::Network(
      {{0}, {1}, {2}, {3}},
      {{0, 3, capacity, fidelity}, {1, 3, capacity, fidelity},
       {2, 3, capacity, fidelity}});
}

}  // namespace testutil
