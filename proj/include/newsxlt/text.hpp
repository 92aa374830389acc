#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace newsxlt {

/// NFC-normalizes `raw`, trims it and collapses every internal run of Unicode
/// whitespace to one U+0020. Throws Error if `raw` is not valid UTF-8.
std::string normalize_text(std::string_view raw);

bool is_valid_utf8(std::string_view s) noexcept;

/// Number of Unicode scalar values in a valid UTF-8 string.
std::size_t char_length(std::string_view s) noexcept;

/// Full Unicode lowercase mapping (root locale).
std::string to_lower(std::string_view s);

/// Splits on ASCII/Unicode whitespace runs; no empty tokens.
std::vector<std::string> split_whitespace(std::string_view s);

std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");

}  // namespace newsxlt
