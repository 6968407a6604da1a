#pragma once

#include <string>
#include <string_view>

namespace wikicite::text {

std::string_view trim(std::string_view s);

std::string ascii_lower(std::string_view s);

bool iequals_ascii(std::string_view a, std::string_view b);
bool istarts_with_ascii(std::string_view s, std::string_view prefix);

/// Decodes UTF-8; malformed sequences become U+FFFD, one per offending byte.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
void append_utf8(std::string& out, char32_t cp);

/// Simple (one-to-one) lowercase mapping covering Latin, Greek, Cyrillic
/// and Armenian. Code points outside those blocks map to themselves.
char32_t to_lower(char32_t cp);

std::string utf8_lower(std::string_view s);

/// Lowercases only the first code point, the way MediaWiki treats the
/// first letter of a page or template name.
std::string lower_first(std::string_view s);

bool is_space(char32_t cp);
bool is_punct(char32_t cp);

/// Trims, then folds runs of whitespace and underscores into one space.
std::string collapse_spaces_and_underscores(std::string_view s);

}  // namespace wikicite::text
