#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wikicite {

enum class IdScheme {
  DOI, PMID, PMC, ISBN, ISSN, JSTOR, BIBCODE, ARXIV, OCLC, LCCN, SSRN,
  OL, OSTI, MR, ZBL, ASIN, RFC, ISMN, JFM, USENETID, SICI,
};

inline constexpr IdScheme kAllSchemes[] = {
    IdScheme::DOI,  IdScheme::PMID, IdScheme::PMC,  IdScheme::ISBN,  IdScheme::ISSN,     IdScheme::JSTOR,
    IdScheme::BIBCODE, IdScheme::ARXIV, IdScheme::OCLC, IdScheme::LCCN, IdScheme::SSRN, IdScheme::OL,
    IdScheme::OSTI, IdScheme::MR,   IdScheme::ZBL,  IdScheme::ASIN,  IdScheme::RFC,      IdScheme::ISMN,
    IdScheme::JFM,  IdScheme::USENETID, IdScheme::SICI,
};

/// Upper-case name as written in datasets ("DOI", "USENETID").
std::string_view scheme_name(IdScheme scheme);

/// Case-insensitive inverse of scheme_name.
std::optional<IdScheme> parse_scheme(std::string_view name);

struct Identifier {
  IdScheme scheme;
  std::string value;
  /// False when a checksum or format check failed; the value is kept.
  bool valid = true;

  bool operator==(const Identifier& o) const { return scheme == o.scheme && value == o.value; }
};

struct NormalizedId {
  std::string value;
  bool valid = true;
};

/// ISBN: separators stripped, check digit verified. DOI: resolver prefixes
/// stripped, lowercased. PMID/PMC: digits only. Others: trimmed.
NormalizedId normalize_identifier(IdScheme scheme, std::string_view raw);

bool isbn10_checksum_ok(std::string_view digits);
bool isbn13_checksum_ok(std::string_view digits);

const Identifier* find_id(const std::vector<Identifier>& ids, IdScheme scheme);

}  // namespace wikicite
