#include "wikicite/classify.hpp"

#include <algorithm>
#include <fstream>

#include "wikicite/errors.hpp"
#include "wikicite/text.hpp"

namespace wikicite::classify {

std::string_view label_name(Label label) {
  switch (label) {
    case Label::journal: return "journal";
    case Label::book: return "book";
    case Label::news: return "news";
    case Label::other: return "other";
  }
  return "other";
}

std::optional<Label> parse_label(std::string_view name) {
  for (Label l : {Label::journal, Label::book, Label::news, Label::other}) {
    if (label_name(l) == name) return l;
  }
  return std::nullopt;
}

std::string_view rule_name(Rule rule) {
  switch (rule) {
    case Rule::pmc_pmid: return "pmc_pmid";
    case Rule::doi_journal_template: return "doi_journal_template";
    case Rule::isbn: return "isbn";
    case Rule::news_tld: return "news_tld";
    case Rule::none: return "none";
  }
  return "none";
}

const std::vector<std::string>& social_hosts() {
  static const std::vector<std::string> kHosts = {"facebook.com", "instagram.com", "twitter.com", "x.com",
                                                  "pinterest.com", "youtube.com", "linkedin.com", "tiktok.com"};
  return kHosts;
}

const std::vector<std::string>& excluded_categories() {
  static const std::vector<std::string> kExcluded = {"conspiracy-pseudo", "questionable", "satire", "science"};
  return kExcluded;
}

namespace {

bool is_social(std::string_view registrable) {
  const auto& hosts = social_hosts();
  return std::find(hosts.begin(), hosts.end(), registrable) != hosts.end();
}

std::string first_segment(std::string_view path) {
  if (path.starts_with("/")) path.remove_prefix(1);
  std::size_t end = path.find('/');
  return text::ascii_lower(path.substr(0, end));
}

}  // namespace

NewsDomainSet::NewsDomainSet(std::shared_ptr<const domain::PublicSuffixList> psl) : psl_(std::move(psl)) {
  if (!psl_) throw std::invalid_argument("NewsDomainSet needs a public suffix list");
}

std::optional<std::string> NewsDomainSet::normalize(std::string_view entry) const {
  std::string e = text::ascii_lower(text::trim(entry));
  if (e.empty()) return std::nullopt;
  if (e.find("://") == std::string::npos && !e.starts_with("//")) e = "//" + e;
  auto parts = domain::parse_url(e);
  if (!parts) return std::nullopt;
  std::string_view host = parts->host;
  if (host.starts_with("www.")) host.remove_prefix(4);
  auto reg = psl_->registrable_domain(host);
  if (!reg) return std::nullopt;
  if (is_social(*reg)) {
    std::string seg = first_segment(parts->path);
    if (!seg.empty()) return *reg + "/" + seg;
  }
  return reg;
}

std::optional<std::string> NewsDomainSet::add(std::string_view entry, std::string_view source) {
  auto norm = normalize(entry);
  if (!norm) return std::nullopt;
  entries_[*norm].insert(std::string(source));
  return norm;
}

bool NewsDomainSet::matches_url(std::string_view url) const {
  auto parts = domain::parse_url(url);
  if (!parts) return false;
  std::string_view host = parts->host;
  if (host.starts_with("www.")) host.remove_prefix(4);
  auto reg = psl_->registrable_domain(host);
  if (!reg) return false;
  if (is_social(*reg)) {
    std::string seg = first_segment(parts->path);
    if (!seg.empty() && entries_.count(*reg + "/" + seg) != 0) return true;
  }
  return entries_.count(*reg) != 0;
}

const std::set<std::string>& NewsDomainSet::sources_of(const std::string& entry) const {
  static const std::set<std::string> kEmpty;
  auto it = entries_.find(entry);
  return it == entries_.end() ? kEmpty : it->second;
}

std::vector<std::string> NewsDomainSet::entries() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [e, _] : entries_) out.push_back(e);
  return out;
}

NewsDomainSet NewsDomainSet::load(const std::vector<std::filesystem::path>& paths,
                                  std::shared_ptr<const domain::PublicSuffixList> psl,
                                  std::vector<std::string>* warnings) {
  NewsDomainSet set(std::move(psl));
  const auto& excluded = excluded_categories();
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read news domain list " + path.string());
    std::string source = path.stem().string();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string_view l = text::trim(line);
      if (l.empty() || l.starts_with("#")) continue;
      if (l.starts_with("source=")) {
        source = std::string(text::trim(l.substr(7)));
        continue;
      }
      std::size_t ws = l.find_first_of(" \t");
      std::string_view entry = l.substr(0, ws);
      if (ws != std::string_view::npos) {
        std::string category = text::ascii_lower(text::trim(l.substr(ws)));
        if (std::find(excluded.begin(), excluded.end(), category) != excluded.end()) continue;
      }
      if (!set.add(entry, source) && warnings != nullptr) {
        warnings->push_back(path.string() + ":" + std::to_string(line_no) + ": unusable entry '" +
                            std::string(entry) + "'");
      }
    }
    set.source_names_.push_back(source);
  }
  if (set.empty() && warnings != nullptr) warnings->push_back("news domain set is empty");
  return set;
}

bool is_journal_template(std::string_view type_of_citation) {
  return type_of_citation == "cite journal" || type_of_citation == "cite conference" ||
         type_of_citation == "cite proceedings";
}

ClassLabel classify(std::string_view type_of_citation, const std::vector<Identifier>& ids,
                    const std::optional<std::string>& url, const NewsDomainSet& news) {
  if (find_id(ids, IdScheme::PMC) != nullptr || find_id(ids, IdScheme::PMID) != nullptr) {
    return {Label::journal, Rule::pmc_pmid};
  }
  if (find_id(ids, IdScheme::DOI) != nullptr && is_journal_template(type_of_citation)) {
    return {Label::journal, Rule::doi_journal_template};
  }
  if (find_id(ids, IdScheme::ISBN) != nullptr) return {Label::book, Rule::isbn};
  if (url && news.matches_url(*url)) return {Label::news, Rule::news_tld};
  return {Label::other, Rule::none};
}

}  // namespace wikicite::classify
