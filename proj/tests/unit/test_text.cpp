#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "casematch/text.hpp"

using namespace casematch;

TEST_CASE("utf8 offsets and length") {
  CHECK(utf8_length("") == 0);
  CHECK(utf8_length("abc") == 3);
  CHECK(utf8_length("甲乙丙") == 3);
  CHECK(utf8_length("a甲b") == 3);
  auto offsets = utf8_offsets("a甲b");
  REQUIRE(offsets.size() == 4);
  CHECK(offsets[0] == 0);
  CHECK(offsets[1] == 1);
  CHECK(offsets[2] == 4);
  CHECK(offsets[3] == 5);
}

TEST_CASE("utf8 prefix truncates on character boundaries") {
  CHECK(utf8_prefix("甲乙丙", 2) == "甲乙");
  CHECK(utf8_prefix("甲乙丙", 5) == "甲乙丙");
  CHECK(utf8_prefix("", 3) == "");
  CHECK(utf8_prefix("abc", 0) == "");
}

TEST_CASE("terminal punctuation") {
  CHECK(has_terminal_punctuation("如下。"));
  CHECK(has_terminal_punctuation("如下；"));
  CHECK(has_terminal_punctuation("如下！"));
  CHECK(has_terminal_punctuation("如下？"));
  CHECK_FALSE(has_terminal_punctuation("如下"));
  CHECK_FALSE(has_terminal_punctuation("。如下"));
  CHECK_FALSE(has_terminal_punctuation(""));
}

TEST_CASE("trim strips ascii and ideographic whitespace") {
  CHECK(trim_whitespace("  abc \n") == "abc");
  CHECK(trim_whitespace("　甲　") == "甲");
  CHECK(trim_whitespace("　 \t") == "");
  CHECK(trim_whitespace("") == "");
}

TEST_CASE("fnv1a64 is stable") {
  // Reference values for the standard 64-bit FNV-1a constants.
  CHECK(fnv1a64("") == 0xCBF29CE484222325ULL);
  CHECK(fnv1a64("a") == 0xAF63DC4C8601EC8CULL);
  CHECK(fnv1a64("abc") == fnv1a64("abc"));
  CHECK(fnv1a64("abc") != fnv1a64("acb"));
}

TEST_CASE("utf8_encode round-trips through offsets") {
  std::string sep = utf8_encode(0x241F);
  CHECK(sep == kSeparatorToken);
  CHECK(utf8_length(sep) == 1);
  CHECK(utf8_encode('A') == "A");
}
