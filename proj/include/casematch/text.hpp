#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace casematch {

// Reserved joint-encoding separator (U+241F, SYMBOL FOR UNIT SEPARATOR).
// Input validation keeps it out of corpus text.
inline constexpr std::string_view kSeparatorToken = "␟";

// Byte offset of every UTF-8 character start, plus one trailing entry equal
// to text.size(). Bytes that do not form a valid sequence count as one
// character each.
std::vector<size_t> utf8_offsets(std::string_view text);

size_t utf8_length(std::string_view text);

// Prefix covering at most max_chars characters.
std::string_view utf8_prefix(std::string_view text, size_t max_chars);

bool utf8_contains(std::string_view text, std::string_view character);

// Terminal punctuation for Chinese legal prose: 。；！？
bool is_terminal_punctuation(std::string_view character);
bool has_terminal_punctuation(std::string_view sentence);

// Strips ASCII whitespace and U+3000 (ideographic space) from both ends.
std::string_view trim_whitespace(std::string_view text);

// Stable 64-bit FNV-1a over raw bytes.
uint64_t fnv1a64(std::string_view bytes);

// Single character encoded from a code point.
std::string utf8_encode(char32_t code_point);

}  // namespace casematch
