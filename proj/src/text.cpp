#include "casematch/text.hpp"

#include <array>

namespace casematch {

namespace {

// Length of the UTF-8 sequence starting at byte b, or 1 for invalid leads.
size_t sequence_length(unsigned char b) {
  if (b < 0x80) return 1;
  if ((b & 0xE0) == 0xC0) return 2;
  if ((b & 0xF0) == 0xE0) return 3;
  if ((b & 0xF8) == 0xF0) return 4;
  return 1;
}

bool is_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }

}  // namespace

std::vector<size_t> utf8_offsets(std::string_view text) {
  std::vector<size_t> offsets;
  offsets.reserve(text.size() + 1);
  size_t i = 0;
  while (i < text.size()) {
    offsets.push_back(i);
    size_t len = sequence_length(static_cast<unsigned char>(text[i]));
    size_t j = i + 1;
    while (j < i + len && j < text.size() &&
           is_continuation(static_cast<unsigned char>(text[j]))) {
      ++j;
    }
    i = (j == i + len) ? j : i + 1;
  }
  offsets.push_back(text.size());
  return offsets;
}

size_t utf8_length(std::string_view text) {
  return utf8_offsets(text).size() - 1;
}

std::string_view utf8_prefix(std::string_view text, size_t max_chars) {
  auto offsets = utf8_offsets(text);
  size_t n = offsets.size() - 1;
  if (n <= max_chars) return text;
  return text.substr(0, offsets[max_chars]);
}

bool utf8_contains(std::string_view text, std::string_view character) {
  return text.find(character) != std::string_view::npos;
}

bool is_terminal_punctuation(std::string_view character) {
  static const std::array<std::string_view, 4> kTerminals = {
      "。",  // 。
      "；",  // ；
      "！",  // ！
      "？",  // ？
  };
  for (auto t : kTerminals) {
    if (character == t) return true;
  }
  return false;
}

bool has_terminal_punctuation(std::string_view sentence) {
  auto offsets = utf8_offsets(sentence);
  if (offsets.size() < 2) return false;
  size_t last = offsets[offsets.size() - 2];
  return is_terminal_punctuation(sentence.substr(last));
}

std::string_view trim_whitespace(std::string_view text) {
  auto is_space_at = [&](size_t i, size_t* width) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
        c == '\v') {
      *width = 1;
      return true;
    }
    // U+3000 ideographic space: e3 80 80
    if (c == 0xE3 && i + 2 < text.size() &&
        static_cast<unsigned char>(text[i + 1]) == 0x80 &&
        static_cast<unsigned char>(text[i + 2]) == 0x80) {
      *width = 3;
      return true;
    }
    return false;
  };
  size_t begin = 0;
  while (begin < text.size()) {
    size_t width = 0;
    if (!is_space_at(begin, &width)) break;
    begin += width;
  }
  size_t end = text.size();
  while (end > begin) {
    // Scan backwards one character, accepting the multi-byte space.
    if (end >= 3) {
      size_t w = 0;
      if (is_space_at(end - 3, &w) && w == 3) {
        end -= 3;
        continue;
      }
    }
    size_t w = 0;
    if (is_space_at(end - 1, &w) && w == 1) {
      end -= 1;
      continue;
    }
    break;
  }
  return text.substr(begin, end - begin);
}

uint64_t fnv1a64(std::string_view bytes) {
  uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char b : bytes) {
    hash ^= b;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

std::string utf8_encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

}  // namespace casematch
