#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace llmnas::eval {

struct ProcessResult {
  int exit_code = -1;   // valid when the process exited normally
  int term_signal = 0;  // non-zero when killed by a signal
  bool timed_out = false;
  std::string stdout_text;
  std::string stderr_text;  // tail only, see kMaxStderrBytes
  std::chrono::milliseconds elapsed{0};

  bool exited_cleanly() const { return !timed_out && term_signal == 0 && exit_code == 0; }
};

inline constexpr std::size_t kMaxStdoutBytes = 16u << 20;
inline constexpr std::size_t kMaxStderrBytes = 64u << 10;

struct ProcessOptions {
  std::optional<std::filesystem::path> working_dir;
  std::vector<std::pair<std::string, std::string>> extra_env;
};

/// Runs `argv` in a fresh process group with `stdin_data` on its standard
/// input and both output streams captured. When `timeout` expires the whole
/// group is killed with SIGKILL and `timed_out` is set. The child is always
/// reaped before returning. Throws Error when the program cannot be started.
ProcessResult run_process(const std::vector<std::string>& argv, std::string_view stdin_data,
                          std::chrono::milliseconds timeout, const ProcessOptions& options = {});

}  // namespace llmnas::eval
