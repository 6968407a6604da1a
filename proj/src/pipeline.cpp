#include "wikicite/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "wikicite/text.hpp"

#ifndef WIKICITE_DEFAULT_DATA_DIR
#define WIKICITE_DEFAULT_DATA_DIR "data"
#endif

namespace wikicite::pipeline {

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("WIKICITE_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return WIKICITE_DEFAULT_DATA_DIR;
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<output::DatasetRow> rows_of_page(const dump::WikiPage& page, const harmonize::Harmonizer& harmonizer,
                                             bool refs_only, ExtractStats* stats) {
  wikicode::ParsedPage parsed = wikicode::parse_page(page.wikitext);
  std::vector<output::DatasetRow> rows;
  harmonize::TranslateReport report;
  for (const auto& t : parsed.templates) {
    if (refs_only && !t.inside_ref) continue;
    if (!harmonizer.is_citation(t)) continue;
    rows.push_back(output::to_row(harmonizer.translate(t, page, &report)));
    if (stats != nullptr) ++stats->template_counts[t.name];
  }
  if (stats != nullptr) {
    stats->templates += parsed.templates.size();
    stats->refs += parsed.refs.size();
    stats->citation_templates += rows.size();
    stats->rows += rows.size();
    stats->diagnostics += parsed.diagnostics;
    stats->unmapped_keys += report.unmapped_keys.size();
    stats->duplicate_ids += report.duplicate_ids.size();
    stats->invalid_ids += report.invalid_ids.size();
  }
  return rows;
}

ExtractStats extract(const ExtractConfig& config, const harmonize::TranslationTable& table,
                     const domain::PublicSuffixList& psl, const dump::RedirectMatcher& redirects,
                     const RowSink& sink) {
  ExtractStats stats;
  dump::PageStream stream = dump::open_dump(config.dump, config.compression, config.skip_bad_pages);
  dump::ArticleFilter articles(stream, redirects);
  harmonize::Harmonizer harmonizer(table, psl);
  const std::size_t jobs = std::max<std::size_t>(1, config.jobs);
  const std::size_t chunk = std::max<std::size_t>(1, config.chunk_pages);

  std::vector<dump::WikiPage> pages;
  std::vector<std::vector<output::DatasetRow>> rows;
  std::vector<ExtractStats> page_stats;
  while (true) {
    pages.clear();
    while (pages.size() < chunk) {
      auto page = articles.next();
      if (!page) break;
      pages.push_back(std::move(*page));
    }
    if (pages.empty()) break;
    rows.assign(pages.size(), {});
    page_stats.assign(pages.size(), {});
    parallel_for(pages.size(), jobs,
                 [&](std::size_t i) { rows[i] = rows_of_page(pages[i], harmonizer, config.refs_only, &page_stats[i]); });
    for (std::size_t i = 0; i < pages.size(); ++i) {
      const ExtractStats& ps = page_stats[i];
      stats.templates += ps.templates;
      stats.refs += ps.refs;
      stats.citation_templates += ps.citation_templates;
      stats.rows += ps.rows;
      stats.unmapped_keys += ps.unmapped_keys;
      stats.duplicate_ids += ps.duplicate_ids;
      stats.invalid_ids += ps.invalid_ids;
      stats.diagnostics += ps.diagnostics;
      for (const auto& [name, n] : ps.template_counts) stats.template_counts[name] += n;
      for (auto& r : rows[i]) sink(std::move(r));
    }
    stats.articles += pages.size();
  }
  stats.dump = stream.stats();
  stats.pages_dropped = articles.dropped();
  stats.warnings = stream.warnings();
  return stats;
}

std::vector<std::pair<std::string, std::size_t>> top_templates(const std::map<std::string, std::size_t>& counts,
                                                               std::size_t n) {
  std::vector<std::pair<std::string, std::size_t>> v(counts.begin(), counts.end());
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (v.size() > n) v.resize(n);
  return v;
}

namespace {

std::size_t text_width(const std::string& s) { return text::decode_utf8(s).size(); }

}  // namespace

std::string render_template_table(const std::vector<std::pair<std::string, std::size_t>>& top) {
  std::size_t name_w = 8;  // "Template"
  std::size_t count_w = 5;
  for (const auto& [name, n] : top) {
    name_w = std::max(name_w, text_width(name));
    count_w = std::max(count_w, std::to_string(n).size());
  }
  auto pad = [](const std::string& s, std::size_t w, std::size_t have) { return s + std::string(w - have, ' '); };
  std::string out = pad("Template", name_w, 8) + "  " + std::string(count_w - 5, ' ') + "Count\n";
  for (const auto& [name, n] : top) {
    std::string c = std::to_string(n);
    out += pad(name, name_w, text_width(name)) + "  " + std::string(count_w - c.size(), ' ') + c + "\n";
  }
  return out;
}

nlohmann::ordered_json to_json(const ExtractStats& s) {
  nlohmann::ordered_json j;
  j["pages_seen"] = s.dump.pages_seen;
  j["pages_in_article_namespace"] = s.dump.pages_in_article_namespace;
  j["pages_skipped"] = s.dump.pages_skipped;
  j["bytes_read"] = s.dump.bytes_read;
  j["articles"] = s.articles;
  j["pages_dropped"] = s.pages_dropped;
  j["templates"] = s.templates;
  j["refs"] = s.refs;
  j["citation_templates"] = s.citation_templates;
  j["rows"] = s.rows;
  j["unmapped_keys"] = s.unmapped_keys;
  j["duplicate_ids"] = s.duplicate_ids;
  j["invalid_ids"] = s.invalid_ids;
  j["unterminated_refs"] = s.diagnostics.unterminated_refs;
  j["reused_refs"] = s.diagnostics.reused_refs;
  j["malformed_refs"] = s.diagnostics.malformed_refs;
  j["unterminated_comments"] = s.diagnostics.unterminated_comments;
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& [name, n] : top_templates(s.template_counts, s.template_counts.size())) counts[name] = n;
  j["template_counts"] = counts;
  return j;
}

classify::ClassLabel label_row(output::DatasetRow& row, const classify::NewsDomainSet& news) {
  classify::ClassLabel l = classify::classify(row.type_of_citation, output::identifiers_of(row.id_list), row.url, news);
  row.actual_label = l.label;
  return l;
}

metrics::MetricsReport label_rows(std::vector<output::DatasetRow>& rows, const classify::NewsDomainSet& news,
                                  std::size_t jobs, std::string language, std::string snapshot) {
  parallel_for(rows.size(), jobs, [&](std::size_t i) { label_row(rows[i], news); });
  metrics::MetricsReport r;
  r.language = std::move(language);
  r.snapshot = std::move(snapshot);
  for (const auto& row : rows) r.add(*row.actual_label);
  return r;
}

}  // namespace wikicite::pipeline
