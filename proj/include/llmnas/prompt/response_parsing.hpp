#pragma once

#include <string>
#include <string_view>

#include "llmnas/core/types.hpp"

namespace llmnas::prompt {

/// Returns the body of the last fenced code block that contains "class Net",
/// without the fence lines or language tag. Falls back to the whole response
/// when no block qualifies but the text mentions "class Net". An unclosed
/// final fence counts as a block running to the end of the response.
/// Throws ExtractionError otherwise.
std::string extract_code(std::string_view llm_response);

// Inverse of extract_code for sources that contain no fence lines.
std::string wrap_in_fence(std::string_view source, std::string_view language = "python");

/// Splits an improver reply on REASON / INSPIRATION / SUGGESTIONS labels
/// (case-insensitive, markdown decoration tolerated). Never fails: without a
/// SUGGESTIONS label the whole reply becomes the suggestions.
ImproverOutput parse_improver_response(std::string_view text);

}  // namespace llmnas::prompt
