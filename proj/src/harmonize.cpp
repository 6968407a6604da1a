#include "wikicite/harmonize.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "wikicite/errors.hpp"
#include "wikicite/text.hpp"

namespace wikicite::harmonize {

const std::vector<std::string>& english_citation_templates() {
  static const std::vector<std::string> kTemplates = {
      "citation",           "cite arxiv",         "cite av media",    "cite av media notes",
      "cite biorxiv",       "cite book",          "cite citeseerx",   "cite conference",
      "cite court",         "cite document",      "cite encyclopedia", "cite episode",
      "cite interview",     "cite journal",       "cite magazine",    "cite mailing list",
      "cite map",           "cite news",          "cite newsgroup",   "cite patent",
      "cite podcast",       "cite press release", "cite proceedings", "cite report",
      "cite serial",        "cite sign",          "cite speech",      "cite ssrn",
      "cite tech report",   "cite thesis",        "cite web",         "vcite journal",
  };
  return kTemplates;
}

bool is_english_citation_template(std::string_view name) {
  const auto& all = english_citation_templates();
  return std::find(all.begin(), all.end(), name) != all.end();
}

namespace {

const std::unordered_set<std::string_view>& english_keys() {
  static const std::unordered_set<std::string_view> kKeys = {
      "title", "trans-title", "script-title", "title-link", "url", "chapter", "trans-chapter", "chapter-url",
      "author", "authors", "last", "first", "surname", "given", "author-last", "author-first", "author-link",
      "vauthors", "editor", "editor-last", "editor-first", "translator", "others", "date", "year", "orig-date",
      "orig-year", "month", "access-date", "publisher", "location", "place", "publication-place",
      "publication-date", "language", "website", "work", "journal", "newspaper", "magazine", "periodical",
      "encyclopedia", "dictionary", "series", "volume", "issue", "number", "pages", "page", "at", "edition",
      "format", "quote", "trans-quote", "archive-url", "archive-date", "url-status", "url-access", "via",
      "type", "id", "department", "agency", "conference", "conference-url", "event", "medium", "network",
      "station", "minutes", "time", "episode", "season", "interviewer", "degree", "institution",
      "contribution", "section", "display-authors", "postscript", "ref", "collaboration", "total-pages",
      // identifiers
      "doi", "pmid", "pmc", "isbn", "issn", "eissn", "jstor", "bibcode", "arxiv", "oclc", "lccn", "ssrn",
      "ol", "osti", "mr", "zbl", "asin", "rfc", "ismn", "jfm", "usenetid", "sici", "s2cid", "hdl",
      "citeseerx",
  };
  return kKeys;
}

// Splits "last12" into ("last", "12"); digits are empty when absent.
std::pair<std::string_view, std::string_view> split_number(std::string_view key) {
  std::size_t i = key.size();
  while (i > 0 && key[i - 1] >= '0' && key[i - 1] <= '9') --i;
  return {key.substr(0, i), key.substr(i)};
}

std::string normalize_key(std::string_view key) { return text::utf8_lower(text::trim(key)); }

}  // namespace

bool is_known_english_key(std::string_view key) {
  if (english_keys().count(key) != 0) return true;
  auto [base, digits] = split_number(key);
  return !digits.empty() && !base.empty() && english_keys().count(base) != 0;
}

const std::vector<std::string>& supported_languages() {
  static const std::vector<std::string> kLanguages = {"en", "de", "fr", "ru", "es", "it", "pl", "pt",
                                                       "nl", "sv", "fi", "tr", "no", "ca", "da"};
  return kLanguages;
}

TranslationTable parse_translation_table(std::string_view language, std::string_view json_text,
                                         std::string_view origin) {
  const auto& langs = supported_languages();
  if (std::find(langs.begin(), langs.end(), language) == langs.end()) {
    throw ConfigError("unsupported language '" + std::string(language) + "'");
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("translation table " + std::string(origin) + " is not valid JSON: " + e.what());
  }
  std::vector<std::string> problems;
  auto schema = [&](const std::string& msg) { problems.push_back(msg); };

  TranslationTable table;
  if (!doc.is_object()) throw ConfigError("translation table " + std::string(origin) + " must be a JSON object");
  if (!doc.contains("language") || !doc["language"].is_string()) {
    schema("missing string field 'language'");
  } else if (doc["language"].get<std::string>() != language) {
    schema("table is for language '" + doc["language"].get<std::string>() + "', expected '" +
           std::string(language) + "'");
  }
  table.language = std::string(language);
  if (doc.contains("passthrough_english")) {
    if (!doc["passthrough_english"].is_boolean()) schema("'passthrough_english' must be a boolean");
    else table.passthrough_english = doc["passthrough_english"].get<bool>();
  }

  auto read_keys = [&](const nlohmann::json& node, const std::string& where, KeyMap& out) {
    if (!node.is_object()) {
      schema(where + " must be an object");
      return;
    }
    for (const auto& [local, english] : node.items()) {
      if (!english.is_string()) {
        schema(where + "." + local + " must be a string");
        continue;
      }
      std::string target = english.get<std::string>();
      if (!is_known_english_key(target)) {
        schema("unknown English key '" + target + "' for " + where + "." + local);
        continue;
      }
      out[normalize_key(local)] = target;
    }
  };

  if (doc.contains("default_keys")) read_keys(doc["default_keys"], "default_keys", table.default_keys);

  if (doc.contains("templates")) {
    if (!doc["templates"].is_array()) {
      schema("'templates' must be an array");
    } else {
      for (const auto& entry : doc["templates"]) {
        if (!entry.is_object() || !entry.contains("local") || !entry["local"].is_string() ||
            !entry.contains("english") || !entry["english"].is_string()) {
          schema("template entries need string fields 'local' and 'english'");
          continue;
        }
        std::string local = wikicode::normalize_template_name(entry["local"].get<std::string>());
        std::string english = entry["english"].get<std::string>();
        if (!is_english_citation_template(english)) {
          schema("unknown English template '" + english + "' for local template '" + local + "'");
        }
        if (table.passthrough_english && is_english_citation_template(local)) {
          schema("local template '" + local + "' shadows an English template");
        }
        if (table.template_map.count(local) != 0) schema("duplicate local template '" + local + "'");
        TemplateMapping mapping;
        mapping.english = english;
        if (entry.contains("keys")) read_keys(entry["keys"], "templates[" + local + "].keys", mapping.keys);
        table.template_map[local] = std::move(mapping);
      }
    }
  }

  if (!problems.empty()) {
    std::string msg = "invalid translation table " + std::string(origin) + ":";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ConfigError(msg);
  }
  return table;
}

TranslationTable load_translation_table(std::string_view language, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read translation table " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_translation_table(language, buf.str(), path.string());
}

bool is_citation_template(const wikicode::RawTemplate& t, const TranslationTable& table) {
  if (table.passthrough_english && is_english_citation_template(t.name)) return true;
  return table.template_map.count(t.name) != 0;
}

namespace {

std::optional<std::string> lookup_key(const KeyMap& keys, const KeyMap& defaults, const std::string& key) {
  if (auto it = keys.find(key); it != keys.end()) return it->second;
  if (auto it = defaults.find(key); it != defaults.end()) return it->second;
  return std::nullopt;
}

std::optional<std::string> resolve_key(const TemplateMapping& mapping, const TranslationTable& table,
                                       const std::string& key) {
  if (auto direct = lookup_key(mapping.keys, table.default_keys, key)) return direct;
  auto [base, digits] = split_number(key);
  if (!digits.empty() && !base.empty()) {
    auto mapped = lookup_key(mapping.keys, table.default_keys, std::string(base));
    if (mapped && split_number(*mapped).second.empty()) return *mapped + std::string(digits);
  }
  // Local templates often reuse English keys (url, isbn, doi).
  if (is_known_english_key(key)) return key;
  return std::nullopt;
}

enum class AuthorPart { none, last, first, author, vauthors };

AuthorPart author_part(std::string_view base) {
  if (base == "last" || base == "surname" || base == "author-last") return AuthorPart::last;
  if (base == "first" || base == "given" || base == "author-first") return AuthorPart::first;
  if (base == "author") return AuthorPart::author;
  if (base == "vauthors") return AuthorPart::vauthors;
  return AuthorPart::none;
}

// Author-family key without a number means N = 1.
std::pair<AuthorPart, int> classify_author_key(std::string_view key) {
  auto [base, digits] = split_number(key);
  AuthorPart part = author_part(base);
  if (part == AuthorPart::none || (part == AuthorPart::vauthors && !digits.empty())) return {AuthorPart::none, 0};
  if (digits.size() > 6) return {AuthorPart::none, 0};
  int n = digits.empty() ? 1 : std::stoi(std::string(digits));
  return {part, n};
}

}  // namespace

std::vector<std::string> assemble_authors(const std::vector<std::pair<std::string, std::string>>& params) {
  struct Name {
    std::string last;
    std::string first;
  };
  std::map<int, Name> pairs;
  std::map<int, std::string> numbered;
  std::string vauthors;
  for (const auto& [key, value] : params) {
    std::string_view v = text::trim(value);
    if (v.empty()) continue;
    auto [part, n] = classify_author_key(key);
    switch (part) {
      case AuthorPart::last:
        if (pairs[n].last.empty()) pairs[n].last = std::string(v);
        break;
      case AuthorPart::first:
        if (pairs[n].first.empty()) pairs[n].first = std::string(v);
        break;
      case AuthorPart::author:
        numbered.emplace(n, std::string(v));
        break;
      case AuthorPart::vauthors:
        if (vauthors.empty()) vauthors = std::string(v);
        break;
      case AuthorPart::none:
        break;
    }
  }
  std::vector<std::string> out;
  for (const auto& [n, name] : pairs) {
    if (!name.last.empty() && !name.first.empty()) out.push_back(name.last + ", " + name.first);
    else if (!name.last.empty()) out.push_back(name.last);
    else if (!name.first.empty()) out.push_back(name.first);
  }
  for (const auto& [n, author] : numbered) out.push_back(author);
  std::size_t pos = 0;
  while (!vauthors.empty() && pos <= vauthors.size()) {
    std::size_t comma = vauthors.find(',', pos);
    if (comma == std::string::npos) comma = vauthors.size();
    std::string_view part = text::trim(std::string_view(vauthors).substr(pos, comma - pos));
    if (!part.empty()) out.emplace_back(part);
    pos = comma + 1;
  }
  return out;
}

Citation translate(const wikicode::RawTemplate& t, const dump::WikiPage& page, const TranslationTable& table,
                   const domain::PublicSuffixList& psl, TranslateReport* report) {
  const bool english = table.passthrough_english && is_english_citation_template(t.name);
  const TemplateMapping* mapping = nullptr;
  if (!english) {
    auto it = table.template_map.find(t.name);
    if (it == table.template_map.end()) {
      throw std::invalid_argument("'" + t.name + "' is not a citation template for language " + table.language);
    }
    mapping = &it->second;
  }

  Citation c;
  c.type_of_citation = english ? t.name : mapping->english;
  c.page_title = page.title;
  c.source_language = table.language;
  c.source_template = t.name;
  if (t.span.end <= page.wikitext.size() && t.span.begin <= t.span.end) {
    c.citation_text = page.wikitext.substr(t.span.begin, t.span.end - t.span.begin);
  }

  int position = 0;
  c.params.reserve(t.params.size());
  for (const auto& p : t.params) {
    std::string local = p.key ? *p.key : std::to_string(++position);
    std::string key;
    if (english) {
      key = local;
    } else if (auto mapped = resolve_key(*mapping, table, local)) {
      key = *mapped;
    } else {
      key = table.language + ":" + local;
      if (report != nullptr) report->unmapped_keys.push_back(t.name + "|" + local);
    }
    c.params.emplace_back(std::move(key), p.value);
  }

  std::unordered_set<std::string_view> consumed;
  for (const auto& [key, value] : c.params) {
    if (text::trim(value).empty()) continue;
    if (key == "title" && !c.title) {
      c.title = value;
      consumed.insert(key);
    } else if (key == "url" && !c.url) {
      c.url = value;
      consumed.insert(key);
    } else if (auto scheme = parse_scheme(key); scheme && key == text::ascii_lower(key)) {
      consumed.insert(key);
      NormalizedId norm = normalize_identifier(*scheme, value);
      if (find_id(c.id_list, *scheme) != nullptr) {
        if (report != nullptr) report->duplicate_ids.push_back(key + "=" + value);
        continue;
      }
      if (!norm.valid && report != nullptr) report->invalid_ids.push_back(key + "=" + value);
      c.id_list.push_back(Identifier{*scheme, std::move(norm.value), norm.valid});
    }
  }
  c.authors = assemble_authors(c.params);
  for (const auto& [key, value] : c.params) {
    bool lifted = (key == "title" || key == "url") ? consumed.count(key) != 0
                                                    : (parse_scheme(key).has_value() && consumed.count(key) != 0);
    if (lifted || classify_author_key(key).first != AuthorPart::none) continue;
    c.extra.emplace_back(key, value);
  }
  if (c.url) c.tld = domain::extract_tld(*c.url, psl);
  return c;
}

}  // namespace wikicite::harmonize
