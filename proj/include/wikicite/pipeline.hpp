#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "wikicite/classify.hpp"
#include "wikicite/dump_ingest.hpp"
#include "wikicite/harmonize.hpp"
#include "wikicite/metrics.hpp"
#include "wikicite/output.hpp"
#include "wikicite/wikicode.hpp"

namespace wikicite::pipeline {

/// $WIKICITE_DATA_DIR if set, else the directory configured at build time.
std::filesystem::path default_data_dir();

struct ExtractConfig {
  std::filesystem::path dump;
  dump::Compression compression = dump::Compression::automatic;
  bool skip_bad_pages = false;
  /// Keep only templates that sit inside a <ref> element.
  bool refs_only = false;
  std::size_t jobs = 1;
  /// Pages handed to the workers at a time.
  std::size_t chunk_pages = 256;
};

struct ExtractStats {
  dump::DumpStats dump;
  std::size_t articles = 0;
  std::size_t pages_dropped = 0;  // other namespaces and redirects
  std::size_t templates = 0;
  std::size_t refs = 0;
  std::size_t citation_templates = 0;
  std::size_t rows = 0;
  std::size_t unmapped_keys = 0;
  std::size_t duplicate_ids = 0;
  std::size_t invalid_ids = 0;
  wikicode::Diagnostics diagnostics;
  /// Citation templates by local (normalized) name.
  std::map<std::string, std::size_t> template_counts;
  std::vector<std::string> warnings;
};

using RowSink = std::function<void(output::DatasetRow&&)>;

/// ingest -> article filter -> wikicode -> harmonize. Pages are parsed in
/// parallel in chunks; rows reach the sink in page order, then template order.
ExtractStats extract(const ExtractConfig& config, const harmonize::TranslationTable& table,
                     const domain::PublicSuffixList& psl, const dump::RedirectMatcher& redirects, const RowSink& sink);

/// Rows of a single page, in template order.
std::vector<output::DatasetRow> rows_of_page(const dump::WikiPage& page, const harmonize::Harmonizer& harmonizer,
                                             bool refs_only, ExtractStats* stats = nullptr);

/// By count descending, then name.
std::vector<std::pair<std::string, std::size_t>> top_templates(const std::map<std::string, std::size_t>& counts,
                                                               std::size_t n);
std::string render_template_table(const std::vector<std::pair<std::string, std::size_t>>& top);
nlohmann::ordered_json to_json(const ExtractStats& s);

/// Sets actual_label from the deterministic rules; any previous label is replaced.
classify::ClassLabel label_row(output::DatasetRow& row, const classify::NewsDomainSet& news);
/// Labels every row; returns label counts as a report.
metrics::MetricsReport label_rows(std::vector<output::DatasetRow>& rows, const classify::NewsDomainSet& news,
                                  std::size_t jobs, std::string language, std::string snapshot);

/// Runs `fn(i)` for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace wikicite::pipeline
