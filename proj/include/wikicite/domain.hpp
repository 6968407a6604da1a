#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>

namespace wikicite::domain {

/// Public suffix rules in the publicsuffix.org format.
class PublicSuffixList {
 public:
  /// ICANN section only unless include_private is set.
  static PublicSuffixList load(const std::filesystem::path& path, bool include_private = false);
  static PublicSuffixList parse(std::string_view data, bool include_private = false);

  /// "bbc.co.uk" for "news.bbc.co.uk"; absent for bare suffixes and IPs.
  std::optional<std::string> registrable_domain(std::string_view host) const;
  std::string public_suffix(std::string_view host) const;

  std::size_t rule_count() const { return rules_.size() + wildcards_.size() + exceptions_.size(); }

 private:
  std::unordered_set<std::string> rules_;
  std::unordered_set<std::string> wildcards_;   // "*.ck" stored as "ck"
  std::unordered_set<std::string> exceptions_;  // "!www.ck" stored as "www.ck"
};

struct UrlParts {
  std::string host;  // lowercased, no port or userinfo
  std::string path;  // from the first '/', query and fragment removed
};

/// Absolute ("scheme://host/...") and protocol-relative ("//host/...") URLs.
std::optional<UrlParts> parse_url(std::string_view url);

std::optional<std::string> registrable_domain_of_url(std::string_view url, const PublicSuffixList& psl);

/// The registrable-domain label left of the public suffix: "bbc" for
/// https://www.bbc.co.uk/.
std::optional<std::string> extract_tld(std::string_view url, const PublicSuffixList& psl);

}  // namespace wikicite::domain
