#include "llmnas/prompt/response_parsing.hpp"

#include <cctype>
#include <optional>
#include <regex>
#include <vector>

#include "llmnas/core/errors.hpp"

namespace llmnas::prompt {

namespace {

constexpr std::string_view kNetToken = "class Net";

struct Line {
  std::size_t begin;  // offset of first char
  std::size_t end;    // offset one past the last char, excluding '\n'
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < text.size()) lines.push_back({pos, text.size()});
      break;
    }
    lines.push_back({pos, nl});
    pos = nl + 1;
  }
  return lines;
}

bool is_fence(std::string_view line) {
  const auto first = line.find_first_not_of(' ');
  return first != std::string_view::npos && first <= 3 && line.substr(first).starts_with("```");
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string extract_code(std::string_view response) {
  const auto lines = split_lines(response);
  std::optional<std::string> chosen;
  std::optional<std::size_t> open_body;  // offset where the current block's body starts

  auto close_block = [&](std::size_t body_end) {
    std::string_view body = response.substr(*open_body, body_end - *open_body);
    if (!body.empty() && body.back() == '\n') body.remove_suffix(1);
    if (body.find(kNetToken) != std::string_view::npos) chosen = std::string(body);
    open_body.reset();
  };

  for (const auto& line : lines) {
    const auto text = response.substr(line.begin, line.end - line.begin);
    if (!is_fence(text)) continue;
    if (open_body) {
      close_block(line.begin);
    } else {
      open_body = std::min(line.end + 1, response.size());
    }
  }
  if (open_body) close_block(response.size());

  if (chosen) return *chosen;
  if (response.find(kNetToken) != std::string_view::npos) return std::string(response);
  throw ExtractionError("no code defining 'class Net' found in the model response");
}

std::string wrap_in_fence(std::string_view source, std::string_view language) {
  std::string out = "```";
  out += language;
  out += '\n';
  out += source;
  out += "\n```\n";
  return out;
}

ImproverOutput parse_improver_response(std::string_view text) {
  enum Field { kReason, kInspiration, kSuggestions };
  // A label line: optional markdown noise, the label word, then ':' / '**' / end.
  static const std::regex kLabel(
      R"(^[\s#*>_\-]*(?:\d+[.)]\s*)?[*_]*\s*(reason|inspiration|(?:improvement\s+)?suggestions?)\s*[*_]*\s*(?::|$)[*_]*\s*(.*)$)",
      std::regex::icase | std::regex::ECMAScript);

  std::optional<std::string> fields[3];
  std::optional<Field> current;
  for (const auto& line : split_lines(text)) {
    std::string s(text.substr(line.begin, line.end - line.begin));
    if (!s.empty() && s.back() == '\r') s.pop_back();
    std::smatch m;
    if (std::regex_match(s, m, kLabel)) {
      std::string label = m[1].str();
      for (auto& ch : label) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      current = label.starts_with("reason")        ? kReason
                : label.starts_with("inspiration") ? kInspiration
                                                   : kSuggestions;
      auto& f = fields[*current];
      if (!f) f = std::string{};
      if (!f->empty()) *f += '\n';
      *f += m[2].str();
      continue;
    }
    if (current) {
      auto& f = *fields[*current];
      f += '\n';
      f += s;
    }
  }

  ImproverOutput out;
  out.reason = fields[kReason] ? trim(*fields[kReason]) : std::string{};
  out.inspiration = fields[kInspiration] ? trim(*fields[kInspiration]) : std::string{};
  out.suggestions = fields[kSuggestions] ? trim(*fields[kSuggestions]) : trim(text);
  return out;
}

}  // namespace llmnas::prompt
