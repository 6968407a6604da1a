#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wikicite::wikicode {

/// Half-open byte range [begin, end) into the original page text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
  bool contains(const Span& other) const { return begin <= other.begin && other.end <= end; }
};

/// A template parameter. Positional parameters have no key; their 1-based
/// position is their rank among the positional parameters of the template.
struct Param {
  std::optional<std::string> key;
  std::string value;

  bool operator==(const Param&) const = default;
};

struct RawTemplate {
  std::string name;  // normalized, see normalize_template_name
  std::vector<Param> params;
  Span span;
  bool inside_ref = false;
  std::optional<std::string> ref_name;
};

struct RefTag {
  std::optional<std::string> name;
  std::string content;
  bool self_closing = false;
  Span span;
  Span content_span;
};

struct Diagnostics {
  std::size_t unterminated_refs = 0;
  std::size_t reused_refs = 0;
  std::size_t malformed_refs = 0;
  std::size_t unterminated_comments = 0;

  Diagnostics& operator+=(const Diagnostics& o);
};

/// Every top-level {{...}} region, in source order. Nested templates stay
/// verbatim inside their parent's parameter values. HTML comments are
/// removed first; <nowiki> regions are opaque.
std::vector<RawTemplate> extract_templates(std::string_view wikitext);

/// Every <ref>...</ref> and <ref .../> element, in source order.
std::vector<RefTag> extract_refs(std::string_view wikitext, Diagnostics* diagnostics = nullptr);

/// Splits the text after a template name on depth-0 pipes.
std::vector<Param> parse_params(std::string_view inner);

std::string normalize_template_name(std::string_view raw);

/// Rebuilds "{{name|k=v|...}}" from a parsed template.
std::string serialize_template(const RawTemplate& t);

struct ParsedPage {
  std::vector<RawTemplate> templates;  // inside_ref/ref_name filled in
  std::vector<RefTag> refs;
  Diagnostics diagnostics;
};

ParsedPage parse_page(std::string_view wikitext);

}  // namespace wikicite::wikicode
