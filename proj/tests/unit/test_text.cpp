#include "doctest.h"
#include "wikicite/text.hpp"

using namespace wikicite;

TEST_CASE("trim and ascii helpers") {
  CHECK(text::trim("  a b \t\n") == "a b");
  CHECK(text::trim("") == "");
  CHECK(text::ascii_lower("Cite WEB") == "cite web");
  CHECK(text::iequals_ascii("ISBN", "isbn"));
  CHECK_FALSE(text::iequals_ascii("isbn", "isbn1"));
  CHECK(text::istarts_with_ascii("#REDIRECT [[x]]", "#redirect"));
}

TEST_CASE("utf-8 decode and encode round trip") {
  std::string s = "Москва Øresund İstanbul 東京 😀";
  CHECK(text::encode_utf8(text::decode_utf8(s)) == s);
  CHECK(text::decode_utf8("é").size() == 1);
  CHECK(text::decode_utf8("😀").size() == 1);
}

TEST_CASE("malformed utf-8 becomes replacement characters") {
  std::u32string d = text::decode_utf8(std::string("a\xff\xfe" "b"));
  REQUIRE(d.size() == 4);
  CHECK(d[1] == U'�');
  CHECK(d[2] == U'�');
  // truncated 3-byte sequence
  CHECK(text::decode_utf8(std::string("\xe6\x9d")).size() == 2);
}

TEST_CASE("lowercase mapping across scripts") {
  CHECK(text::utf8_lower("ÉCOLE") == "école");
  CHECK(text::utf8_lower("КНИГА") == "книга");
  CHECK(text::utf8_lower("ΑΘΗΝΑ") == "αθηνα");
  CHECK(text::lower_first("Cite web") == "cite web");
  CHECK(text::lower_first("Книга") == "книга");
  CHECK(text::lower_first("") == "");
}

TEST_CASE("whitespace and underscore folding") {
  CHECK(text::collapse_spaces_and_underscores("  cite__web \t x ") == "cite web x");
  CHECK(text::collapse_spaces_and_underscores("a_b") == "a b");
}
