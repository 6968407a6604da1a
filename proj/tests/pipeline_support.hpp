#pragma once

#include <string>
#include <vector>

#include "test_support.hpp"
#include "wikicite/pipeline.hpp"

namespace wikicite::testing {

inline const std::vector<std::string>& fixture_languages() {
  static const std::vector<std::string> langs = {"ca", "da", "de", "es", "fi", "fr", "it",
                                                 "nl", "no", "pl", "pt", "ru", "sv", "tr"};
  return langs;
}

inline std::vector<std::filesystem::path> news_lists() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(data_dir() / "news")) {
    if (e.path().extension() == ".txt") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline const classify::NewsDomainSet& news() {
  static const classify::NewsDomainSet set = classify::NewsDomainSet::load(news_lists(), shared_psl());
  return set;
}

/// Extracts and labels the fixture dump for one language and renders the
/// dataset as a single CSV file.
inline std::string fixture_dataset_csv(const std::string& language, std::size_t jobs, std::size_t chunk_pages) {
  auto table = harmonize::load_translation_table(language, data_dir() / "tables" / (language + ".json"));
  auto redirects = dump::RedirectMatcher::load(data_dir() / "redirects.json");
  pipeline::ExtractConfig cfg;
  cfg.dump = fixtures_dir() / "mini_dump.xml";
  cfg.jobs = jobs;
  cfg.chunk_pages = chunk_pages;
  std::vector<output::DatasetRow> rows;
  pipeline::extract(cfg, table, psl(), redirects, [&](output::DatasetRow&& r) { rows.push_back(std::move(r)); });
  pipeline::label_rows(rows, news(), jobs, language, "fixture");
  TempDir dir;
  auto parts = output::write_rows(rows, dir.path(), {output::Format::csv, 0, false});
  return slurp(parts.at(0));
}

inline std::string golden_csv(const std::string& language) {
  return slurp(fixtures_dir() / "golden" / (language + ".csv"));
}

}  // namespace wikicite::testing
