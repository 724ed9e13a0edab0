#pragma once

#include <string>
#include <string_view>

namespace llmnas {

// Lowercase hex SHA-256 of `text`.
std::string digest(std::string_view text);

}  // namespace llmnas
