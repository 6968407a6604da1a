#include "wikicite/domain.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <vector>

#include "wikicite/errors.hpp"
#include "wikicite/text.hpp"

namespace wikicite::domain {

PublicSuffixList PublicSuffixList::load(const std::filesystem::path& path, bool include_private) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read public suffix list " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), include_private);
}

PublicSuffixList PublicSuffixList::parse(std::string_view data, bool include_private) {
  PublicSuffixList psl;
  bool in_private = false;
  std::size_t pos = 0;
  while (pos <= data.size()) {
    std::size_t nl = data.find('\n', pos);
    if (nl == std::string_view::npos) nl = data.size();
    std::string_view line = text::trim(data.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.starts_with("//")) {
      if (line.find("===BEGIN PRIVATE DOMAINS===") != std::string_view::npos) in_private = true;
      if (line.find("===END PRIVATE DOMAINS===") != std::string_view::npos) in_private = false;
      continue;
    }
    if (line.empty() || (in_private && !include_private)) continue;
    std::size_t ws = line.find_first_of(" \t");
    std::string rule = text::utf8_lower(line.substr(0, ws));
    if (rule.starts_with("!")) {
      psl.exceptions_.insert(rule.substr(1));
    } else if (rule.starts_with("*.")) {
      psl.wildcards_.insert(rule.substr(2));
    } else {
      psl.rules_.insert(rule);
    }
  }
  return psl;
}

namespace {

std::vector<std::string_view> split_labels(std::string_view host) {
  std::vector<std::string_view> labels;
  std::size_t pos = 0;
  while (true) {
    std::size_t dot = host.find('.', pos);
    labels.push_back(host.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos));
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  return labels;
}

std::string join_from(const std::vector<std::string_view>& labels, std::size_t i) {
  std::string out;
  for (std::size_t k = i; k < labels.size(); ++k) {
    if (k > i) out.push_back('.');
    out.append(labels[k]);
  }
  return out;
}

// Number of trailing labels forming the public suffix.
std::size_t suffix_length(const std::vector<std::string_view>& labels,
                          const std::unordered_set<std::string>& rules,
                          const std::unordered_set<std::string>& wildcards,
                          const std::unordered_set<std::string>& exceptions) {
  const std::size_t n = labels.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::string candidate = join_from(labels, i);
    if (exceptions.count(candidate) != 0) return n - i - 1;
    if (rules.count(candidate) != 0) return n - i;
    if (i + 1 < n && wildcards.count(join_from(labels, i + 1)) != 0) return n - i;
  }
  return 1;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

std::string PublicSuffixList::public_suffix(std::string_view host) const {
  auto labels = split_labels(host);
  return join_from(labels, labels.size() - suffix_length(labels, rules_, wildcards_, exceptions_));
}

std::optional<std::string> PublicSuffixList::registrable_domain(std::string_view raw_host) const {
  std::string lowered = text::ascii_lower(raw_host);
  std::string_view host = lowered;
  if (!host.empty() && host.back() == '.') host.remove_suffix(1);  // fully qualified form
  if (host.empty() || host.front() == '.' || host.back() == '.') return std::nullopt;
  auto labels = split_labels(host);
  if (std::any_of(labels.begin(), labels.end(), [](std::string_view l) { return l.empty(); })) return std::nullopt;
  if (all_digits(labels.back())) return std::nullopt;  // IPv4 literal
  std::size_t suffix = suffix_length(labels, rules_, wildcards_, exceptions_);
  if (suffix >= labels.size()) return std::nullopt;
  return join_from(labels, labels.size() - suffix - 1);
}

std::optional<UrlParts> parse_url(std::string_view url) {
  url = text::trim(url);
  std::size_t authority = 0;
  if (url.starts_with("//")) {
    authority = 2;
  } else {
    std::size_t sep = url.find("://");
    if (sep == std::string_view::npos || sep == 0) return std::nullopt;
    auto is_scheme_char = [](char c) {
      return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '+' ||
             c == '-' || c == '.';
    };
    char first = url[0];
    if (!((first >= 'a' && first <= 'z') || (first >= 'A' && first <= 'Z'))) return std::nullopt;
    if (!std::all_of(url.begin(), url.begin() + static_cast<std::ptrdiff_t>(sep), is_scheme_char)) {
      return std::nullopt;
    }
    authority = sep + 3;
  }
  std::size_t end = url.find_first_of("/?#", authority);
  std::string_view host = url.substr(authority, end == std::string_view::npos ? std::string_view::npos
                                                                              : end - authority);
  if (std::size_t at = host.rfind('@'); at != std::string_view::npos) host.remove_prefix(at + 1);
  if (host.starts_with("[")) return std::nullopt;  // IPv6 literal
  if (std::size_t colon = host.rfind(':'); colon != std::string_view::npos) {
    if (!all_digits(host.substr(colon + 1)) && colon + 1 != host.size()) return std::nullopt;
    host = host.substr(0, colon);
  }
  while (!host.empty() && host.back() == '.') host.remove_suffix(1);
  if (host.empty() || host.find('.') == std::string_view::npos) return std::nullopt;
  for (char c : host) {
    auto u = static_cast<unsigned char>(c);
    if (u <= 0x20 || std::string_view("<>\"{}|\\^`[]%'").find(c) != std::string_view::npos) return std::nullopt;
  }
  UrlParts parts;
  parts.host = text::utf8_lower(host);
  if (end != std::string_view::npos && url[end] == '/') {
    std::size_t path_end = url.find_first_of("?#", end);
    parts.path = std::string(url.substr(end, path_end == std::string_view::npos ? std::string_view::npos
                                                                                : path_end - end));
  }
  return parts;
}

std::optional<std::string> registrable_domain_of_url(std::string_view url, const PublicSuffixList& psl) {
  auto parts = parse_url(url);
  if (!parts) return std::nullopt;
  std::string_view host = parts->host;
  if (host.starts_with("www.")) host.remove_prefix(4);
  return psl.registrable_domain(host);
}

std::optional<std::string> extract_tld(std::string_view url, const PublicSuffixList& psl) {
  auto reg = registrable_domain_of_url(url, psl);
  if (!reg) return std::nullopt;
  return reg->substr(0, reg->find('.'));
}

}  // namespace wikicite::domain
