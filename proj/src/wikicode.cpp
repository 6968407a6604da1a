#include "wikicite/wikicode.hpp"

#include <algorithm>

#include "wikicite/text.hpp"

namespace wikicite::wikicode {

Diagnostics& Diagnostics::operator+=(const Diagnostics& o) {
  unterminated_refs += o.unterminated_refs;
  reused_refs += o.reused_refs;
  malformed_refs += o.malformed_refs;
  unterminated_comments += o.unterminated_comments;
  return *this;
}

namespace {

bool is_tag_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Position just past "</tag" + optional spaces + ">" if that closing tag
// starts at `pos`, else npos.
std::size_t match_closing_tag(std::string_view s, std::size_t pos, std::string_view tag) {
  if (s.size() < pos + 2 + tag.size() || s[pos] != '<' || s[pos + 1] != '/') return std::string_view::npos;
  if (!text::iequals_ascii(s.substr(pos + 2, tag.size()), tag)) return std::string_view::npos;
  std::size_t i = pos + 2 + tag.size();
  while (i < s.size() && is_tag_space(s[i])) ++i;
  return (i < s.size() && s[i] == '>') ? i + 1 : std::string_view::npos;
}

std::size_t find_closing_tag(std::string_view s, std::size_t from, std::string_view tag, std::size_t* end) {
  for (std::size_t pos = s.find("</", from); pos != std::string_view::npos; pos = s.find("</", pos + 1)) {
    std::size_t e = match_closing_tag(s, pos, tag);
    if (e != std::string_view::npos) {
      *end = e;
      return pos;
    }
  }
  return std::string_view::npos;
}

// <nowiki>...</nowiki> and <nowiki/> regions, tags included.
std::vector<Span> find_nowiki_regions(std::string_view s) {
  std::vector<Span> out;
  std::size_t pos = 0;
  while ((pos = s.find('<', pos)) != std::string_view::npos) {
    if (!text::istarts_with_ascii(s.substr(pos + 1), "nowiki")) {
      ++pos;
      continue;
    }
    std::size_t i = pos + 7;
    while (i < s.size() && is_tag_space(s[i])) ++i;
    if (i + 1 < s.size() && s[i] == '/' && s[i + 1] == '>') {
      out.push_back({pos, i + 2});
      pos = i + 2;
      continue;
    }
    if (i < s.size() && s[i] == '>') {
      std::size_t end = 0;
      if (find_closing_tag(s, i + 1, "nowiki", &end) != std::string_view::npos) {
        out.push_back({pos, end});
        pos = end;
        continue;
      }
    }
    ++pos;
  }
  return out;
}

// Page text with comments removed, plus a map back to original offsets.
struct CleanText {
  std::string text;
  std::vector<std::size_t> origin;  // size text.size() + 1
  std::vector<char> opaque;
  std::size_t unterminated_comments = 0;

  Span to_original(std::size_t b, std::size_t e) const {
    if (b == e) return {origin[b], origin[b]};
    return {origin[b], origin[e - 1] + 1};
  }
};

CleanText clean(std::string_view src) {
  CleanText c;
  c.text.reserve(src.size());
  c.origin.reserve(src.size() + 1);
  std::size_t i = 0;
  while (i < src.size()) {
    if (src[i] == '<' && src.compare(i, 4, "<!--") == 0) {
      std::size_t close = src.find("-->", i + 4);
      if (close == std::string_view::npos) {
        ++c.unterminated_comments;
        i = src.size();
        break;
      }
      i = close + 3;
      continue;
    }
    c.text.push_back(src[i]);
    c.origin.push_back(i);
    ++i;
  }
  c.origin.push_back(src.size());
  c.opaque.assign(c.text.size(), 0);
  for (const Span& r : find_nowiki_regions(c.text)) {
    std::fill(c.opaque.begin() + static_cast<std::ptrdiff_t>(r.begin),
              c.opaque.begin() + static_cast<std::ptrdiff_t>(r.end), 1);
  }
  return c;
}

// Calls on_hit(pos) for each `target` byte at brace/link depth 0 outside
// <nowiki>. Stops early when on_hit returns false.
template <typename OnHit>
void scan_depth0(std::string_view s, char target, OnHit on_hit) {
  std::vector<Span> nowiki = find_nowiki_regions(s);
  std::size_t nw = 0;
  int braces = 0;
  int links = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    if (nw < nowiki.size() && i == nowiki[nw].begin) {
      i = nowiki[nw++].end;
      continue;
    }
    char c = s[i];
    char d = i + 1 < s.size() ? s[i + 1] : '\0';
    if (c == '{' && d == '{') {
      ++braces;
      i += 2;
    } else if (c == '}' && d == '}') {
      if (braces > 0) --braces;
      i += 2;
    } else if (c == '[' && d == '[') {
      ++links;
      i += 2;
    } else if (c == ']' && d == ']') {
      if (links > 0) --links;
      i += 2;
    } else {
      if (c == target && braces == 0 && links == 0 && !on_hit(i)) return;
      ++i;
    }
  }
}

std::size_t find_depth0(std::string_view s, char target) {
  std::size_t found = std::string_view::npos;
  scan_depth0(s, target, [&](std::size_t pos) {
    found = pos;
    return false;
  });
  return found;
}

// Matched {{ }} pairs over the greedy token sequence, outermost only.
std::vector<Span> top_level_pairs(const CleanText& c) {
  const std::string& s = c.text;
  std::vector<std::size_t> stack;
  std::vector<Span> pairs;
  std::size_t i = 0;
  while (i + 1 < s.size()) {
    if (c.opaque[i] || c.opaque[i + 1]) {
      ++i;
      continue;
    }
    if (s[i] == '{' && s[i + 1] == '{') {
      stack.push_back(i);
      i += 2;
    } else if (s[i] == '}' && s[i + 1] == '}') {
      if (!stack.empty()) {
        pairs.push_back({stack.back(), i + 2});
        stack.pop_back();
      }
      i += 2;
    } else {
      ++i;
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Span& a, const Span& b) { return a.begin < b.begin; });
  std::vector<Span> top;
  std::size_t last_end = 0;
  for (const Span& p : pairs) {
    if (top.empty() || p.begin >= last_end) {
      top.push_back(p);
      last_end = p.end;
    }
  }
  return top;
}

struct CleanTemplate {
  RawTemplate tmpl;
  Span clean_span;
};

std::vector<CleanTemplate> templates_from(const CleanText& c) {
  std::vector<CleanTemplate> out;
  std::string_view s = c.text;
  for (const Span& p : top_level_pairs(c)) {
    std::string_view inner = s.substr(p.begin + 2, p.end - p.begin - 4);
    std::size_t pipe = find_depth0(inner, '|');
    CleanTemplate ct;
    ct.tmpl.name = normalize_template_name(inner.substr(0, pipe));
    if (pipe != std::string_view::npos) ct.tmpl.params = parse_params(inner.substr(pipe + 1));
    ct.tmpl.span = c.to_original(p.begin, p.end);
    ct.clean_span = p;
    out.push_back(std::move(ct));
  }
  return out;
}

// Parses the attribute list of an opening tag; returns the name attribute.
std::optional<std::string> parse_name_attribute(std::string_view attrs) {
  std::size_t i = 0;
  while (i < attrs.size()) {
    while (i < attrs.size() && is_tag_space(attrs[i])) ++i;
    std::size_t key_begin = i;
    while (i < attrs.size() && !is_tag_space(attrs[i]) && attrs[i] != '=') ++i;
    std::string key = text::ascii_lower(attrs.substr(key_begin, i - key_begin));
    while (i < attrs.size() && is_tag_space(attrs[i])) ++i;
    if (i >= attrs.size() || attrs[i] != '=') {
      if (i == key_begin) ++i;
      continue;
    }
    ++i;
    while (i < attrs.size() && is_tag_space(attrs[i])) ++i;
    std::string value;
    if (i < attrs.size() && (attrs[i] == '"' || attrs[i] == '\'')) {
      char q = attrs[i++];
      std::size_t close = attrs.find(q, i);
      if (close == std::string_view::npos) close = attrs.size();
      value = std::string(attrs.substr(i, close - i));
      i = close + 1;
    } else {
      std::size_t b = i;
      while (i < attrs.size() && !is_tag_space(attrs[i])) ++i;
      value = std::string(attrs.substr(b, i - b));
    }
    if (key == "name") {
      std::string trimmed(text::trim(value));
      if (!trimmed.empty()) return trimmed;
    }
  }
  return std::nullopt;
}

struct CleanRef {
  RefTag ref;
  Span clean_content;
};

std::vector<CleanRef> refs_from(const CleanText& c, Diagnostics& diag) {
  std::vector<CleanRef> out;
  std::string_view s = c.text;
  std::size_t pos = 0;
  while ((pos = s.find('<', pos)) != std::string_view::npos) {
    if (c.opaque[pos] || !text::istarts_with_ascii(s.substr(pos + 1), "ref") || pos + 4 >= s.size() ||
        !(is_tag_space(s[pos + 4]) || s[pos + 4] == '>' || s[pos + 4] == '/')) {
      ++pos;
      continue;
    }
    // find the end of the opening tag, respecting quoted attribute values
    std::size_t i = pos + 4;
    char quote = 0;
    while (i < s.size()) {
      char ch = s[i];
      if (quote != 0) {
        if (ch == quote) quote = 0;
      } else if (ch == '"' || ch == '\'') {
        quote = ch;
      } else if (ch == '>' || ch == '<') {
        break;
      }
      ++i;
    }
    if (i >= s.size() || s[i] != '>') {
      ++diag.malformed_refs;
      ++pos;
      continue;
    }
    bool self_closing = s[i - 1] == '/';
    std::string_view attrs = s.substr(pos + 4, i - pos - 4 - (self_closing ? 1 : 0));
    CleanRef cr;
    cr.ref.name = parse_name_attribute(attrs);
    cr.ref.self_closing = self_closing;
    if (self_closing) {
      if (!cr.ref.name) {
        ++diag.malformed_refs;
        pos = i + 1;
        continue;
      }
      ++diag.reused_refs;
      cr.clean_content = {i + 1, i + 1};
      cr.ref.span = c.to_original(pos, i + 1);
      cr.ref.content_span = c.to_original(i + 1, i + 1);
      out.push_back(std::move(cr));
      pos = i + 1;
      continue;
    }
    std::size_t content_begin = i + 1;
    std::size_t close_end = 0;
    std::size_t close = content_begin;
    while (true) {
      close = find_closing_tag(s, close, "ref", &close_end);
      if (close == std::string_view::npos || !c.opaque[close]) break;
      ++close;
    }
    if (close == std::string_view::npos) {
      ++diag.unterminated_refs;
      close = s.size();
      close_end = s.size();
    }
    cr.ref.content = std::string(s.substr(content_begin, close - content_begin));
    cr.clean_content = {content_begin, close};
    cr.ref.span = c.to_original(pos, close_end);
    cr.ref.content_span = c.to_original(content_begin, close);
    out.push_back(std::move(cr));
    pos = close_end;
  }
  return out;
}

}  // namespace

std::vector<RawTemplate> extract_templates(std::string_view wikitext) {
  CleanText c = clean(wikitext);
  std::vector<RawTemplate> out;
  for (auto& ct : templates_from(c)) out.push_back(std::move(ct.tmpl));
  return out;
}

std::vector<RefTag> extract_refs(std::string_view wikitext, Diagnostics* diagnostics) {
  CleanText c = clean(wikitext);
  Diagnostics local;
  std::vector<RefTag> out;
  for (auto& cr : refs_from(c, local)) out.push_back(std::move(cr.ref));
  local.unterminated_comments = c.unterminated_comments;
  if (diagnostics != nullptr) *diagnostics += local;
  return out;
}

std::vector<Param> parse_params(std::string_view inner) {
  std::vector<std::size_t> pipes;
  scan_depth0(inner, '|', [&](std::size_t pos) {
    pipes.push_back(pos);
    return true;
  });
  std::vector<Param> out;
  out.reserve(pipes.size() + 1);
  std::size_t begin = 0;
  for (std::size_t k = 0; k <= pipes.size(); ++k) {
    std::size_t end = k < pipes.size() ? pipes[k] : inner.size();
    std::string_view segment = inner.substr(begin, end - begin);
    std::size_t eq = find_depth0(segment, '=');
    Param p;
    if (eq == std::string_view::npos) {
      p.value = std::string(text::trim(segment));
    } else {
      p.key = text::utf8_lower(text::trim(segment.substr(0, eq)));
      p.value = std::string(text::trim(segment.substr(eq + 1)));
    }
    out.push_back(std::move(p));
    begin = end + 1;
  }
  return out;
}

std::string normalize_template_name(std::string_view raw) {
  return text::lower_first(text::collapse_spaces_and_underscores(raw));
}

std::string serialize_template(const RawTemplate& t) {
  // Names and values are trimmed on parse, so a space is free padding that
  // keeps a leading '{' or trailing '}' from fusing with the braces.
  std::string out = "{{";
  if (!t.name.empty() && t.name.front() == '{') out.push_back(' ');
  out += t.name;
  for (const Param& p : t.params) {
    out.push_back('|');
    if (p.key) {
      out += *p.key;
      out.push_back('=');
    }
    out += p.value;
  }
  if (!out.empty() && out.back() == '}' && out.size() > 2) out.push_back(' ');
  out += "}}";
  return out;
}

ParsedPage parse_page(std::string_view wikitext) {
  CleanText c = clean(wikitext);
  ParsedPage page;
  std::vector<CleanRef> refs = refs_from(c, page.diagnostics);
  page.diagnostics.unterminated_comments = c.unterminated_comments;
  std::vector<CleanTemplate> templates = templates_from(c);

  // both lists are in source order and refs never overlap each other
  std::size_t r = 0;
  for (auto& ct : templates) {
    while (r < refs.size() && refs[r].clean_content.end < ct.clean_span.end) ++r;
    if (r < refs.size() && refs[r].clean_content.contains(ct.clean_span)) {
      ct.tmpl.inside_ref = true;
      ct.tmpl.ref_name = refs[r].ref.name;
    }
    page.templates.push_back(std::move(ct.tmpl));
  }
  for (auto& cr : refs) page.refs.push_back(std::move(cr.ref));
  return page;
}

}  // namespace wikicite::wikicode
