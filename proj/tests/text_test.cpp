#include <doctest.h>

#include "gamesum/text.hpp"

using namespace gamesum;

TEST_CASE("utf8 round trip and char length") {
  const std::string s = "Suarez 梅西 1-0!";
  CHECK(text::encode_utf8(text::decode_utf8(s)) == s);
  CHECK(text::char_length(s) == 12);
  CHECK(text::char_length("") == 0);
}

TEST_CASE("substr_chars slices by characters") {
  const std::string s = "ab梅西cd";
  CHECK(text::substr_chars(s, 2, 4) == "梅西");
  CHECK(text::substr_chars(s, 0, 2) == "ab");
  CHECK(text::substr_chars(s, 4, 6) == "cd");
  CHECK(text::substr_chars(s, 5, 99) == "d");
}

TEST_CASE("invalid utf8 decodes to replacement characters") {
  const std::string bad = "a\xFF\xFE b";
  const std::u32string cps = text::decode_utf8(bad);
  CHECK(cps.size() == 5);
  CHECK(cps[1] == 0xFFFD);
  CHECK(cps[2] == 0xFFFD);
}

TEST_CASE("word tokens split punctuation and keep spans") {
  const auto tokens = text::word_tokens("Suarez scored the ball!!!");
  REQUIRE(tokens.size() == 4);
  CHECK(tokens[0].token == "Suarez");
  CHECK(tokens[0].begin == 0);
  CHECK(tokens[0].end == 6);
  CHECK(tokens[3].token == "ball");
}

TEST_CASE("word tokens treat each CJK character as a token") {
  const auto tokens = text::word_tokens("梅西 shot 第90分钟");
  REQUIRE(tokens.size() == 7);
  CHECK(tokens[0].token == "梅");
  CHECK(tokens[1].token == "西");
  CHECK(tokens[2].token == "shot");
  CHECK(tokens[3].token == "第");
  CHECK(tokens[4].token == "90");
}

TEST_CASE("alphanumeric runs stay joined") {
  const auto tokens = text::word_token_strings("In the 45th minute");
  REQUIRE(tokens.size() == 4);
  CHECK(tokens[2] == "45th");
}

TEST_CASE("char tokens drop whitespace only") {
  const auto tokens = text::char_token_strings("a b!");
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[0] == "a");
  CHECK(tokens[1] == "b");
  CHECK(tokens[2] == "!");
}

TEST_CASE("trim strips unicode whitespace") {
  CHECK(text::trim("  x ") == "x");
  CHECK(text::trim("　梅西　") == "梅西");
  CHECK(text::trim(" \t ") == "");
}
