#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "wikicite/domain.hpp"
#include "wikicite/harmonize.hpp"
#include "wikicite/identifiers.hpp"

namespace wikicite::classify {

enum class Label { journal, book, news, other };
enum class Rule { pmc_pmid, doi_journal_template, isbn, news_tld, none };

std::string_view label_name(Label label);
std::optional<Label> parse_label(std::string_view name);
std::string_view rule_name(Rule rule);

struct ClassLabel {
  Label label = Label::other;
  Rule rule_fired = Rule::none;
  bool operator==(const ClassLabel&) const = default;
};

/// Hosts whose news presence is a page under the host, not the host itself.
const std::vector<std::string>& social_hosts();

/// mediabiasfactcheck categories left out of the news set.
const std::vector<std::string>& excluded_categories();

/// Consolidated news domains. Entries are registrable domains, except for
/// social hosts where the first path segment is kept ("facebook.com/bbcnews").
class NewsDomainSet {
 public:
  explicit NewsDomainSet(std::shared_ptr<const domain::PublicSuffixList> psl);

  /// One file per source: one entry per line, '#' comments, optional
  /// "source=<name>" header, optional second column with a category.
  /// Throws ConfigError on an unreadable file.
  static NewsDomainSet load(const std::vector<std::filesystem::path>& paths,
                            std::shared_ptr<const domain::PublicSuffixList> psl,
                            std::vector<std::string>* warnings = nullptr);

  /// Returns the stored form, or nullopt if the entry could not be normalized.
  std::optional<std::string> add(std::string_view entry, std::string_view source);

  /// Normalized form of a list entry without inserting it.
  std::optional<std::string> normalize(std::string_view entry) const;

  bool matches_url(std::string_view url) const;
  bool contains(std::string_view normalized_entry) const { return entries_.count(std::string(normalized_entry)) != 0; }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::set<std::string>& sources_of(const std::string& entry) const;
  /// Sorted entries.
  std::vector<std::string> entries() const;
  const std::vector<std::string>& source_names() const { return source_names_; }
  const domain::PublicSuffixList& suffixes() const { return *psl_; }

 private:
  std::shared_ptr<const domain::PublicSuffixList> psl_;
  std::map<std::string, std::set<std::string>> entries_;
  std::vector<std::string> source_names_;
};

/// Templates for which a DOI implies a journal article.
bool is_journal_template(std::string_view type_of_citation);

/// First matching rule wins: PMC/PMID, DOI with a journal template, ISBN,
/// news domain, otherwise other.
ClassLabel classify(std::string_view type_of_citation, const std::vector<Identifier>& ids,
                    const std::optional<std::string>& url, const NewsDomainSet& news);

inline ClassLabel classify(const harmonize::Citation& c, const NewsDomainSet& news) {
  return classify(c.type_of_citation, c.id_list, c.url, news);
}

}  // namespace wikicite::classify
