#include "llmnas/prompt/templates.hpp"

#include <fstream>
#include <span>
#include <sstream>

#include "llmnas/core/errors.hpp"

namespace llmnas::prompt {

std::string render_template(std::string_view text, const TemplateVars& vars) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto open = text.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, open - pos));
    const auto close = text.find("}}", open + 2);
    if (close == std::string_view::npos) throw TemplateError("unclosed '{{' in template");
    const auto name = text.substr(open + 2, close - open - 2);
    const auto it = vars.find(name);
    if (it == vars.end()) throw TemplateError("no value for placeholder {{" + std::string(name) + "}}");
    out.append(it->second);
    pos = close + 2;
  }
  return out;
}

TemplateFile TemplateFile::parse(std::string_view text, std::string origin) {
  TemplateFile file;
  file.origin_ = std::move(origin);
  std::string* current = nullptr;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl + 1;
    const auto line = text.substr(pos, end - pos);
    pos = end;
    if (line.starts_with("@@ ")) {
      std::string name(line.substr(3));
      while (!name.empty() && (name.back() == '\n' || name.back() == '\r' || name.back() == ' ')) {
        name.pop_back();
      }
      if (name.empty()) throw TemplateError(file.origin_ + ": empty section name");
      auto [it, inserted] = file.sections_.emplace(name, std::string{});
      if (!inserted) throw TemplateError(file.origin_ + ": duplicate section '" + name + "'");
      current = &it->second;
      continue;
    }
    if (current == nullptr) {
      if (line.find_first_not_of(" \t\r\n") == std::string_view::npos) continue;
      throw TemplateError(file.origin_ + ": text before the first '@@ section' line");
    }
    current->append(line);
  }
  return file;
}

TemplateFile TemplateFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TemplateError("cannot read template file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

bool TemplateFile::has(std::string_view section) const { return sections_.contains(section); }

const std::string& TemplateFile::section(std::string_view name) const {
  const auto it = sections_.find(name);
  if (it == sections_.end()) {
    throw TemplateError(origin_ + ": missing section '" + std::string(name) + "'");
  }
  return it->second;
}

std::string TemplateFile::render(std::string_view name, const TemplateVars& vars) const {
  try {
    return render_template(section(name), vars);
  } catch (const TemplateError& e) {
    throw TemplateError(origin_ + " [" + std::string(name) + "]: " + e.what());
  }
}

std::vector<std::string> TemplateFile::section_names() const {
  std::vector<std::string> names;
  for (const auto& [name, _] : sections_) names.push_back(name);
  return names;
}

namespace {
constexpr std::string_view kGeneratorSections[] = {
    "role", "task", "reference", "scratch", "suggestions", "exemplars_header",
    "exemplar", "attempts_header", "attempt", "contract"};
constexpr std::string_view kImproverSections[] = {
    "role", "best", "no_best", "current", "current_missing", "history", "response_format"};

void require(const TemplateFile& file, std::span<const std::string_view> names,
             const std::string& origin) {
  for (auto name : names) {
    if (!file.has(name)) {
      throw TemplateError(origin + ": missing required section '" + std::string(name) + "'");
    }
  }
}
}  // namespace

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  PromptTemplates t{TemplateFile::load(dir / "generator.txt"), TemplateFile::load(dir / "improver.txt")};
  require(t.generator, kGeneratorSections, (dir / "generator.txt").string());
  require(t.improver, kImproverSections, (dir / "improver.txt").string());
  return t;
}

std::filesystem::path default_template_dir() { return LLMNAS_TEMPLATE_DIR; }

PromptTemplates PromptTemplates::load_default() { return load(default_template_dir()); }

}  // namespace llmnas::prompt
