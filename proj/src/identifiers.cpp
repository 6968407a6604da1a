#include "wikicite/identifiers.hpp"

#include <algorithm>

#include "wikicite/text.hpp"

namespace wikicite {

std::string_view scheme_name(IdScheme scheme) {
  switch (scheme) {
    case IdScheme::DOI: return "DOI";
    case IdScheme::PMID: return "PMID";
    case IdScheme::PMC: return "PMC";
    case IdScheme::ISBN: return "ISBN";
    case IdScheme::ISSN: return "ISSN";
    case IdScheme::JSTOR: return "JSTOR";
    case IdScheme::BIBCODE: return "BIBCODE";
    case IdScheme::ARXIV: return "ARXIV";
    case IdScheme::OCLC: return "OCLC";
    case IdScheme::LCCN: return "LCCN";
    case IdScheme::SSRN: return "SSRN";
    case IdScheme::OL: return "OL";
    case IdScheme::OSTI: return "OSTI";
    case IdScheme::MR: return "MR";
    case IdScheme::ZBL: return "ZBL";
    case IdScheme::ASIN: return "ASIN";
    case IdScheme::RFC: return "RFC";
    case IdScheme::ISMN: return "ISMN";
    case IdScheme::JFM: return "JFM";
    case IdScheme::USENETID: return "USENETID";
    case IdScheme::SICI: return "SICI";
  }
  return "";
}

std::optional<IdScheme> parse_scheme(std::string_view name) {
  for (IdScheme s : kAllSchemes) {
    if (text::iequals_ascii(scheme_name(s), name)) return s;
  }
  return std::nullopt;
}

bool isbn10_checksum_ok(std::string_view d) {
  if (d.size() != 10) return false;
  int sum = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    int v = 0;
    if (d[i] >= '0' && d[i] <= '9') v = d[i] - '0';
    else if (d[i] == 'X' && i == 9) v = 10;
    else return false;
    sum += static_cast<int>(10 - i) * v;
  }
  return sum % 11 == 0;
}

bool isbn13_checksum_ok(std::string_view d) {
  if (d.size() != 13) return false;
  int sum = 0;
  for (std::size_t i = 0; i < 13; ++i) {
    if (d[i] < '0' || d[i] > '9') return false;
    sum += (d[i] - '0') * (i % 2 == 0 ? 1 : 3);
  }
  return sum % 10 == 0;
}

namespace {

std::string digits_only(std::string_view s) {
  std::string out;
  std::copy_if(s.begin(), s.end(), std::back_inserter(out), [](char c) { return c >= '0' && c <= '9'; });
  return out;
}

bool issn_checksum_ok(std::string_view s) {
  std::string d;
  for (char c : s) {
    if (c != '-') d.push_back(c);
  }
  if (d.size() != 8) return false;
  int sum = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    int v = 0;
    if (d[i] >= '0' && d[i] <= '9') v = d[i] - '0';
    else if (d[i] == 'X' && i == 7) v = 10;
    else return false;
    sum += static_cast<int>(8 - i) * v;
  }
  return sum % 11 == 0;
}

}  // namespace

NormalizedId normalize_identifier(IdScheme scheme, std::string_view raw) {
  std::string_view v = text::trim(raw);
  switch (scheme) {
    case IdScheme::ISBN: {
      if (text::istarts_with_ascii(v, "isbn")) {
        v.remove_prefix(4);
        if (!v.empty() && v.front() == ':') v.remove_prefix(1);
        v = text::trim(v);
      }
      std::string out;
      for (char c : v) {
        if (c == '-' || c == ' ' || c == '\t') continue;
        out.push_back(c == 'x' ? 'X' : c);
      }
      bool valid = out.size() == 10 ? isbn10_checksum_ok(out) : isbn13_checksum_ok(out);
      return {out, valid};
    }
    case IdScheme::DOI: {
      for (std::string_view prefix : {"https://doi.org/", "http://doi.org/", "https://dx.doi.org/",
                                      "http://dx.doi.org/", "doi.org/", "doi:"}) {
        if (text::istarts_with_ascii(v, prefix)) {
          v.remove_prefix(prefix.size());
          v = text::trim(v);
          break;
        }
      }
      std::string out = text::ascii_lower(v);
      bool valid = out.starts_with("10.") && out.find('/') != std::string::npos;
      return {out, valid};
    }
    case IdScheme::PMID: {
      std::string out = digits_only(v);
      return {out, !out.empty() && out.size() == v.size()};
    }
    case IdScheme::PMC: {
      std::string_view body = v;
      if (text::istarts_with_ascii(body, "pmc")) body.remove_prefix(3);
      std::string out = digits_only(body);
      return {out, !out.empty() && out.size() == text::trim(body).size()};
    }
    case IdScheme::ISSN: {
      std::string out(v);
      std::transform(out.begin(), out.end(), out.begin(), [](char c) { return c == 'x' ? 'X' : c; });
      return {out, issn_checksum_ok(out)};
    }
    default:
      return {std::string(v), !v.empty()};
  }
}

const Identifier* find_id(const std::vector<Identifier>& ids, IdScheme scheme) {
  auto it = std::find_if(ids.begin(), ids.end(), [&](const Identifier& id) { return id.scheme == scheme; });
  return it == ids.end() ? nullptr : &*it;
}

}  // namespace wikicite
