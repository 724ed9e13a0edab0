#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "llmnas/core/types.hpp"

namespace llmnas {

struct LogReadResult {
  std::vector<RunLogRecord> records;
  // Byte length of the prefix made of complete, well-formed records.
  std::uintmax_t valid_bytes = 0;
  // Set when a trailing partial line was found after the valid prefix.
  bool torn_tail = false;
  std::string warning;
};

/// Reads a JSONL run log. A final line that is unterminated or unparseable
/// is reported as a torn tail; any earlier malformed line, or iterations not
/// strictly increasing, raise CorruptLog.
LogReadResult read_run_log(const std::filesystem::path& path);

/// Cuts the file back to `valid_bytes`, dropping a torn tail.
void truncate_run_log(const std::filesystem::path& path, std::uintmax_t valid_bytes);

class RunLogWriter {
 public:
  enum class Mode { CreateNew, Overwrite, Append };

  RunLogWriter(const std::filesystem::path& path, Mode mode);

  // Writes one record as a single line and flushes. Throws LogWriteError.
  void append(const RunLogRecord& record);

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace llmnas
