#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wikicite/domain.hpp"
#include "wikicite/dump_ingest.hpp"
#include "wikicite/identifiers.hpp"
#include "wikicite/wikicode.hpp"

namespace wikicite::harmonize {

/// Version tag of the English template set and key vocabulary below.
inline constexpr std::string_view kEnglishSchemaVersion = "2024.02-1";

/// English citation templates accepted verbatim. A best-effort
/// reconstruction of the ~30 templates handled for English Wikipedia.
const std::vector<std::string>& english_citation_templates();
bool is_english_citation_template(std::string_view name);

/// Target key vocabulary. Numbered variants ("last2") are accepted when
/// their base ("last") is known.
bool is_known_english_key(std::string_view key);

/// ISO-639-1 codes of the 15 shipped editions.
const std::vector<std::string>& supported_languages();

using KeyMap = std::unordered_map<std::string, std::string>;

struct TemplateMapping {
  std::string english;
  KeyMap keys;
};

struct TranslationTable {
  std::string language;
  bool passthrough_english = true;
  std::map<std::string, TemplateMapping> template_map;  // normalized local name
  KeyMap default_keys;
};

/// Validates against the English schema. Unknown targets are collected and
/// reported together in one ConfigError.
TranslationTable parse_translation_table(std::string_view language, std::string_view json_text,
                                         std::string_view origin = "<memory>");
TranslationTable load_translation_table(std::string_view language, const std::filesystem::path& path);

/// Harmonized citation in the common English schema.
struct Citation {
  std::string type_of_citation;
  std::string page_title;
  std::optional<std::string> title;
  std::optional<std::string> url;
  std::optional<std::string> tld;
  std::vector<std::string> authors;
  std::vector<Identifier> id_list;
  std::string citation_text;
  /// Every parameter after key translation, values byte-identical to source.
  std::vector<std::pair<std::string, std::string>> params;
  /// params not lifted into title/url/authors/id_list.
  std::vector<std::pair<std::string, std::string>> extra;
  std::string source_language;
  std::string source_template;
};

struct TranslateReport {
  std::vector<std::string> unmapped_keys;
  std::vector<std::string> duplicate_ids;
  std::vector<std::string> invalid_ids;
};

bool is_citation_template(const wikicode::RawTemplate& t, const TranslationTable& table);

/// Precondition: is_citation_template(t, table).
Citation translate(const wikicode::RawTemplate& t, const dump::WikiPage& page, const TranslationTable& table,
                   const domain::PublicSuffixList& psl, TranslateReport* report = nullptr);

/// Author list from translated params: lastN/firstN pairs by N, then
/// authorN, then comma-separated vauthors.
std::vector<std::string> assemble_authors(const std::vector<std::pair<std::string, std::string>>& params);

/// Translation entry point that bundles a table with the suffix list.
class Harmonizer {
 public:
  Harmonizer(const TranslationTable& table, const domain::PublicSuffixList& psl) : table_(&table), psl_(&psl) {}

  bool is_citation(const wikicode::RawTemplate& t) const { return is_citation_template(t, *table_); }
  Citation translate(const wikicode::RawTemplate& t, const dump::WikiPage& page,
                     TranslateReport* report = nullptr) const {
    return harmonize::translate(t, page, *table_, *psl_, report);
  }
  const TranslationTable& table() const { return *table_; }

 private:
  const TranslationTable* table_;
  const domain::PublicSuffixList* psl_;
};

}  // namespace wikicite::harmonize
