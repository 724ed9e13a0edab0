#include "llmnas/core/run_log.hpp"

#include <sstream>

#include "llmnas/core/errors.hpp"
#include "llmnas/core/serialization.hpp"

namespace llmnas {

namespace fs = std::filesystem;

LogReadResult read_run_log(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptLog("cannot open run log: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();

  LogReadResult result;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < data.size()) {
    ++line_no;
    const auto nl = data.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    const std::size_t end = terminated ? nl : data.size();
    const bool last = !terminated || end + 1 == data.size();
    const std::string_view line(data.data() + pos, end - pos);

    RunLogRecord record;
    std::string error;
    try {
      record = nlohmann::json::parse(line).get<RunLogRecord>();
    } catch (const std::exception& e) {
      error = e.what();
    }

    if (!terminated || (!error.empty() && last)) {
      result.torn_tail = true;
      result.warning = "run log " + path.string() + ": dropping partial record on line " +
                       std::to_string(line_no) + " (" +
                       (terminated ? error : std::string("unterminated line")) + ")";
      break;
    }
    if (!error.empty()) {
      throw CorruptLog("run log " + path.string() + ": malformed record on line " +
                       std::to_string(line_no) + ": " + error);
    }
    if (!result.records.empty() && record.iteration <= result.records.back().iteration) {
      throw CorruptLog("run log " + path.string() + ": iteration " +
                       std::to_string(record.iteration) + " on line " + std::to_string(line_no) +
                       " does not follow iteration " +
                       std::to_string(result.records.back().iteration));
    }
    result.records.push_back(std::move(record));
    pos = end + 1;
    result.valid_bytes = pos;
  }
  return result;
}

void truncate_run_log(const fs::path& path, std::uintmax_t valid_bytes) {
  std::error_code ec;
  fs::resize_file(path, valid_bytes, ec);
  if (ec) throw LogWriteError("cannot truncate run log " + path.string() + ": " + ec.message());
}

RunLogWriter::RunLogWriter(const fs::path& path, Mode mode) : path_(path) {
  if (mode == Mode::CreateNew && fs::exists(path)) {
    throw LogWriteError("run log already exists: " + path.string());
  }
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  auto flags = std::ios::binary | std::ios::out;
  flags |= mode == Mode::Append ? std::ios::app : std::ios::trunc;
  out_.open(path, flags);
  if (!out_) throw LogWriteError("cannot open run log for writing: " + path.string());
}

void RunLogWriter::append(const RunLogRecord& record) {
  nlohmann::json j = record;
  out_ << dump_line(j) << '\n';
  out_.flush();
  if (!out_) throw LogWriteError("write to run log failed: " + path_.string());
}

}  // namespace llmnas
