#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace llmnas::prompt {

using TemplateVars = std::map<std::string, std::string, std::less<>>;

/// Replaces every `{{name}}` in `text` with vars[name]. Substitution is a
/// single pass: placeholder syntax inside substituted values is left alone.
/// Throws TemplateError for a placeholder with no value or an unclosed `{{`.
std::string render_template(std::string_view text, const TemplateVars& vars);

/// A template file split into named sections. Each section starts with a
/// line `@@ <name>` and runs until the next such line.
class TemplateFile {
 public:
  static TemplateFile parse(std::string_view text, std::string origin = "<memory>");
  static TemplateFile load(const std::filesystem::path& path);

  bool has(std::string_view section) const;
  const std::string& section(std::string_view name) const;
  std::string render(std::string_view name, const TemplateVars& vars) const;
  std::vector<std::string> section_names() const;

 private:
  std::string origin_;
  std::map<std::string, std::string, std::less<>> sections_;
};

// generator.txt + improver.txt from one directory.
struct PromptTemplates {
  TemplateFile generator;
  TemplateFile improver;

  /// Loads and checks that every section the builders need is present.
  static PromptTemplates load(const std::filesystem::path& dir);
  static PromptTemplates load_default();
};

std::filesystem::path default_template_dir();

}  // namespace llmnas::prompt
