#include "cli.hpp"

#include <algorithm>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "wikicite/classify.hpp"
#include "wikicite/domain.hpp"
#include "wikicite/errors.hpp"
#include "wikicite/files.hpp"
#include "wikicite/harmonize.hpp"
#include "wikicite/lookup.hpp"
#include "wikicite/manifest.hpp"
#include "wikicite/metrics.hpp"
#include "wikicite/output.hpp"
#include "wikicite/pipeline.hpp"

namespace wikicite::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

/// JSON config: top-level scalars/arrays set main options, objects named
/// after a subcommand set that subcommand's options.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    dump_app(app, default_also, j);
    return j.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConfigError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void collect(const nlohmann::json& obj, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) {
        auto p = parents;
        p.push_back(key);
        collect(value, p, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }

  static void dump_app(const CLI::App* app, bool default_also, nlohmann::ordered_json& j) {
    for (const CLI::Option* opt : app->get_options()) {
      if (!opt->get_configurable() || opt->get_lnames().empty()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        auto results = opt->results();
        if (results.size() == 1) j[name] = results.front();
        else j[name] = results;
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      nlohmann::ordered_json s = nlohmann::ordered_json::object();
      dump_app(sub, default_also, s);
      if (!s.empty()) j[sub->get_name()] = s;
    }
  }
};

struct GlobalOptions {
  fs::path data_dir;
  std::size_t jobs = 1;
};

struct ExtractOptions {
  fs::path dump;
  std::string language;
  fs::path out;
  std::string format = "csv";
  fs::path tables_dir;
  fs::path suffix_list;
  fs::path redirects;
  std::size_t max_rows = 1'000'000;
  bool extended = false;
  bool skip_bad_pages = false;
  std::string compression = "auto";
  std::size_t top = 10;
  bool refs_only = false;
  bool all = false;
};

struct ClassifyOptions {
  fs::path in;
  fs::path out;
  std::vector<fs::path> news_lists;
  std::string format;
  std::size_t max_rows = 1'000'000;
  bool extended = false;
  std::string language;
  std::string snapshot;
};

struct LookupOptions {
  fs::path in;
  fs::path out;
  std::vector<std::string> endpoints;
  fs::path mock_db;
  double threshold = 0.1;
  std::size_t batch_size = 1000;
  fs::path checkpoint_dir;
  std::size_t in_flight = 1;
  double rate = 1.0;
  int max_attempts = 4;
  std::uint64_t seed = 0;
  long long failure_budget = -1;
  std::string contact;
  std::string books_key;
  std::string crossref_url;
  std::string books_url;
  std::size_t stop_after_batches = 0;
  std::string format;
  std::size_t max_rows = 1'000'000;
  bool extended = false;
};

struct StatsOptions {
  std::vector<fs::path> inputs;
  std::vector<std::string> snapshots;
  std::string language;
  fs::path json_out;
};

dump::Compression parse_compression(const std::string& s) {
  if (s == "auto") return dump::Compression::automatic;
  if (s == "none") return dump::Compression::none;
  if (s == "bz2") return dump::Compression::bz2;
  throw ConfigError("unknown compression '" + s + "' (expected auto, none or bz2)");
}

std::shared_ptr<const domain::PublicSuffixList> load_suffixes(const fs::path& path, RunManifest& manifest) {
  auto psl = std::make_shared<domain::PublicSuffixList>(domain::PublicSuffixList::load(path));
  manifest.add_input("suffix_list", path);
  return psl;
}

std::vector<fs::path> default_news_lists(const fs::path& data_dir) {
  std::vector<fs::path> lists;
  fs::path dir = data_dir / "news";
  if (!fs::is_directory(dir)) return lists;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".txt") lists.push_back(e.path());
  }
  std::sort(lists.begin(), lists.end());
  return lists;
}

classify::NewsDomainSet load_news(std::vector<fs::path> lists, const GlobalOptions& g,
                                  std::shared_ptr<const domain::PublicSuffixList> psl, RunManifest& manifest,
                                  std::ostream& err) {
  if (lists.empty()) lists = default_news_lists(g.data_dir);
  std::vector<std::string> warnings;
  auto news = classify::NewsDomainSet::load(lists, std::move(psl), &warnings);
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  for (const auto& p : lists) manifest.add_input("news_lists", p);
  return news;
}

output::Format output_format(const std::string& requested, const fs::path& input) {
  if (!requested.empty()) return output::parse_format(requested);
  return output::detect_format(input);
}

void print_metrics(const metrics::MetricsReport& r, std::ostream& out) {
  out << metrics::render_table({r});
}

struct LookupRun {
  lookup::LookupSummary summary;
  std::size_t augmented = 0;
  std::size_t requests = 0;
};

/// Runs lookup over rows in place. Returns nullopt when the run stopped early.
std::optional<LookupRun> lookup_rows(std::vector<output::DatasetRow>& rows, const LookupOptions& o,
                                     const GlobalOptions& g, const fs::path& out_dir, RunManifest& manifest,
                                     std::ostream& out) {
  (void)g;
  std::vector<std::string> endpoints = o.endpoints;
  if (endpoints.empty()) endpoints = {"crossref", "books"};
  bool mock = std::find(endpoints.begin(), endpoints.end(), "mock") != endpoints.end();
  if (mock && endpoints.size() > 1) throw ConfigError("--endpoint mock cannot be combined with live endpoints");

  std::unique_ptr<lookup::MockSearch> mock_search;
  std::unique_ptr<lookup::CrossrefSearch> crossref;
  std::unique_ptr<lookup::BooksSearch> books;
  lookup::Endpoints raw;
  if (mock) {
    if (o.mock_db.empty()) throw ConfigError("--endpoint mock needs --mock-db");
    mock_search = lookup::MockSearch::load(o.mock_db);
    manifest.add_input("mock_db", o.mock_db);
    raw.crossref = mock_search.get();
    raw.books = mock_search.get();
  } else {
    for (const auto& e : endpoints) {
      lookup::HttpOptions http;
      http.contact = o.contact;
      if (e == "crossref") {
        http.base_url = o.crossref_url;
        crossref = std::make_unique<lookup::CrossrefSearch>(http);
        raw.crossref = crossref.get();
      } else if (e == "books") {
        http.base_url = o.books_url;
        http.api_key = o.books_key;
        books = std::make_unique<lookup::BooksSearch>(http);
        raw.books = books.get();
      } else {
        throw ConfigError("unknown endpoint '" + e + "' (expected crossref, books or mock)");
      }
    }
  }

  lookup::PolicyOptions policy;
  policy.requests_per_second = mock ? 0.0 : o.rate;
  policy.max_attempts = o.max_attempts;
  policy.seed = o.seed;
  if (mock) policy.base_delay = std::chrono::milliseconds(0);
  std::unique_ptr<lookup::PoliteSearch> polite_crossref;
  std::unique_ptr<lookup::PoliteSearch> polite_books;
  lookup::Endpoints endpoints_used;
  if (raw.crossref != nullptr) {
    polite_crossref = std::make_unique<lookup::PoliteSearch>(*raw.crossref, policy);
    endpoints_used.crossref = polite_crossref.get();
  }
  if (raw.books != nullptr) {
    polite_books = std::make_unique<lookup::PoliteSearch>(*raw.books, policy);
    endpoints_used.books = polite_books.get();
  }

  std::vector<lookup::LookupRequest> requests;
  for (auto& r : lookup::select_lookup_candidates(rows)) {
    if ((r.target == lookup::Target::crossref && endpoints_used.crossref != nullptr) ||
        (r.target == lookup::Target::books && endpoints_used.books != nullptr)) {
      requests.push_back(std::move(r));
    }
  }

  lookup::LookupConfig config;
  config.batch_size = o.batch_size;
  config.threshold = o.threshold;
  config.checkpoint_dir = o.checkpoint_dir.empty() ? out_dir / "checkpoints" : o.checkpoint_dir;
  config.in_flight = o.in_flight;
  if (o.stop_after_batches > 0) config.stop_after_batches = o.stop_after_batches;

  LookupRun run;
  run.requests = requests.size();
  run.summary = lookup::run_lookup(std::move(requests), endpoints_used, config);
  out << "lookup: " << run.summary.batches_processed << " batches processed, " << run.summary.batches_skipped
      << " skipped from checkpoints, " << run.summary.batches_total << " total\n";
  if (!run.summary.complete) {
    out << "lookup: stopped before completion; rerun with the same checkpoint directory to resume\n";
    return std::nullopt;
  }
  run.augmented = lookup::apply_results(rows, lookup::read_results(config.checkpoint_dir));
  const auto& c = run.summary.counts;
  out << "lookup: " << c.requests << " requests, " << c.accepted << " accepted, " << c.rejected << " rejected, "
      << c.no_result << " without result, " << c.transport_error << " transport errors; " << run.augmented
      << " rows augmented\n";
  manifest.set("threshold", o.threshold);
  manifest.set_counts("lookup", {{"requests", c.requests},
                                 {"accepted", c.accepted},
                                 {"rejected", c.rejected},
                                 {"no_result", c.no_result},
                                 {"transport_error", c.transport_error},
                                 {"augmented_rows", run.augmented},
                                 {"batches", run.summary.batches_total}});
  return run;
}

void check_failure_budget(const LookupRun& run, const LookupOptions& o) {
  if (o.failure_budget >= 0 &&
      run.summary.counts.transport_error > static_cast<std::size_t>(o.failure_budget)) {
    throw EndpointError(std::to_string(run.summary.counts.transport_error) +
                        " requests failed at the endpoint, budget is " + std::to_string(o.failure_budget));
  }
}

std::vector<fs::path> write_dataset(const std::vector<output::DatasetRow>& rows, const fs::path& dir,
                                    output::Format format, std::size_t max_rows, bool extended) {
  output::WriterOptions w;
  w.format = format;
  w.max_rows_per_file = max_rows;
  w.extended = extended;
  return output::write_rows(rows, dir, w);
}

void write_metrics(const metrics::MetricsReport& report, const fs::path& dir) {
  write_file_atomic(dir / "metrics.json", metrics::to_json(report).dump(2) + "\n");
}

ojson lookup_config_json(const LookupOptions& o) {
  return {{"endpoints", o.endpoints}, {"threshold", o.threshold}, {"batch_size", o.batch_size},
          {"in_flight", o.in_flight}, {"rate", o.rate},           {"max_attempts", o.max_attempts},
          {"seed", o.seed},           {"failure_budget", o.failure_budget}};
}

int cmd_extract(const ExtractOptions& o, const ClassifyOptions& c, const LookupOptions& l, const GlobalOptions& g,
                const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunManifest manifest(o.all ? "extract --all" : "extract", args);
  const auto& langs = harmonize::supported_languages();
  if (std::find(langs.begin(), langs.end(), o.language) == langs.end()) {
    throw ConfigError("unsupported language '" + o.language + "'");
  }
  fs::path table_path = (o.tables_dir.empty() ? g.data_dir / "tables" : o.tables_dir) / (o.language + ".json");
  fs::path suffix_path = o.suffix_list.empty() ? g.data_dir / "public_suffix_list.dat" : o.suffix_list;
  fs::path redirect_path = o.redirects.empty() ? g.data_dir / "redirects.json" : o.redirects;
  output::Format format = output::parse_format(o.format);
  if (!fs::exists(o.dump)) throw InputError("dump not found: " + o.dump.string());

  harmonize::TranslationTable table = harmonize::load_translation_table(o.language, table_path);
  manifest.add_input("translation_table", table_path);
  auto psl = load_suffixes(suffix_path, manifest);
  dump::RedirectMatcher redirects = dump::RedirectMatcher::load(redirect_path);
  manifest.add_input("redirects", redirect_path);
  manifest.add_input("dump", o.dump);
  manifest.set_config({{"language", o.language},
                       {"format", o.format},
                       {"max_rows", o.max_rows},
                       {"extended", o.extended},
                       {"skip_bad_pages", o.skip_bad_pages},
                       {"compression", o.compression},
                       {"refs_only", o.refs_only},
                       {"english_schema", std::string(harmonize::kEnglishSchemaVersion)},
                       {"all", o.all},
                       {"lookup", o.all && !l.endpoints.empty() ? lookup_config_json(l) : ojson(nullptr)}});

  pipeline::ExtractConfig config;
  config.dump = o.dump;
  config.compression = parse_compression(o.compression);
  config.skip_bad_pages = o.skip_bad_pages;
  config.refs_only = o.refs_only;
  config.jobs = g.jobs;

  std::vector<output::DatasetRow> rows;
  std::unique_ptr<output::DatasetWriter> writer;
  if (!o.all) {
    output::WriterOptions w;
    w.format = format;
    w.max_rows_per_file = o.max_rows;
    w.extended = o.extended;
    writer = std::make_unique<output::DatasetWriter>(o.out, w);
  }
  pipeline::RowSink sink = [&](output::DatasetRow&& row) {
    if (writer) writer->write(row);
    else rows.push_back(std::move(row));
  };
  pipeline::ExtractStats stats = pipeline::extract(config, table, *psl, redirects, sink);
  for (const auto& w : stats.warnings) err << "warning: " << w << "\n";

  out << "pages seen: " << stats.dump.pages_seen << ", article namespace: " << stats.dump.pages_in_article_namespace
      << ", articles: " << stats.articles << ", skipped: " << stats.dump.pages_skipped
      << ", bytes read: " << stats.dump.bytes_read << "\n";
  out << "templates: " << stats.templates << ", citation templates: " << stats.citation_templates
      << ", refs: " << stats.refs << ", unmapped keys: " << stats.unmapped_keys << "\n";
  out << pipeline::render_template_table(pipeline::top_templates(stats.template_counts, o.top));
  manifest.set_counts("extract", pipeline::to_json(stats));

  std::vector<fs::path> files;
  std::optional<LookupRun> lookup_run;
  if (writer) {
    files = writer->finish();
  } else {
    RunManifest& m = manifest;
    auto news = load_news(c.news_lists, g, psl, m, err);
    metrics::MetricsReport report =
        pipeline::label_rows(rows, news, g.jobs, o.language, c.snapshot);
    print_metrics(report, out);
    manifest.set_counts("classify", metrics::to_json(report));
    if (!l.endpoints.empty()) {
      lookup_run = lookup_rows(rows, l, g, o.out, manifest, out);
      if (!lookup_run) return kOk;
    }
    files = write_dataset(rows, o.out, format, o.max_rows, o.extended);
    write_metrics(report, o.out);
  }
  out << "rows: " << stats.rows << " written to " << o.out.string() << "\n";
  manifest.add_outputs(files);
  manifest.write(o.out);
  if (lookup_run) check_failure_budget(*lookup_run, l);
  return kOk;
}

int cmd_classify(const ClassifyOptions& o, const GlobalOptions& g, const std::vector<std::string>& args,
                 std::ostream& out, std::ostream& err) {
  RunManifest manifest("classify", args);
  output::Format format = output_format(o.format, o.in);
  auto psl = load_suffixes(g.data_dir / "public_suffix_list.dat", manifest);
  auto news = load_news(o.news_lists, g, psl, manifest, err);
  out << "news domains: " << news.size() << " entries from " << news.source_names().size() << " lists\n";
  std::vector<output::DatasetRow> rows = output::read_rows(o.in);
  for (const auto& f : output::dataset_files(o.in)) manifest.add_input("dataset", f);
  manifest.set_config({{"format", std::string(output::format_name(format))},
                       {"max_rows", o.max_rows},
                       {"extended", o.extended},
                       {"language", o.language},
                       {"snapshot", o.snapshot}});
  metrics::MetricsReport report = pipeline::label_rows(rows, news, g.jobs, o.language, o.snapshot);
  print_metrics(report, out);
  auto files = write_dataset(rows, o.out, format, o.max_rows, o.extended);
  write_metrics(report, o.out);
  manifest.set_counts("classify", metrics::to_json(report));
  manifest.add_outputs(files);
  manifest.write(o.out);
  return kOk;
}

int cmd_lookup(const LookupOptions& o, const GlobalOptions& g, const std::vector<std::string>& args,
               std::ostream& out) {
  RunManifest manifest("lookup", args);
  output::Format format = output_format(o.format, o.in);
  std::vector<output::DatasetRow> rows = output::read_rows(o.in);
  for (const auto& f : output::dataset_files(o.in)) manifest.add_input("dataset", f);
  manifest.set_config(lookup_config_json(o));
  auto run = lookup_rows(rows, o, g, o.out, manifest, out);
  if (!run) return kOk;
  auto files = write_dataset(rows, o.out, format, o.max_rows, o.extended);
  manifest.add_outputs(files);
  manifest.write(o.out);
  check_failure_budget(*run, o);
  return kOk;
}

metrics::MetricsReport report_for(const fs::path& input, const std::string& language, const std::string& snapshot) {
  if (fs::is_regular_file(input) && input.extension() == ".json") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(input));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(input.string() + " is not valid JSON: " + e.what());
    }
    try {
      metrics::MetricsReport r = metrics::metrics_from_json(j);
      if (!language.empty()) r.language = language;
      if (!snapshot.empty()) r.snapshot = snapshot;
      return r;
    } catch (const nlohmann::json::exception& e) {
      throw InputError(input.string() + " is not a metrics report: " + e.what());
    } catch (const std::invalid_argument& e) {
      throw InputError(input.string() + ": " + e.what());
    }
  }
  metrics::MetricsReport r;
  r.language = language;
  r.snapshot = snapshot.empty() ? input.filename().string() : snapshot;
  output::RowReader reader(input);
  while (auto row = reader.next()) {
    if (!row->actual_label) throw InputError(input.string() + " holds unlabeled rows; run classify first");
    r.add(*row->actual_label);
  }
  return r;
}

int cmd_stats(const StatsOptions& o, std::ostream& out) {
  if (!o.snapshots.empty() && o.snapshots.size() != o.inputs.size()) {
    throw ConfigError("give one --snapshot per input");
  }
  std::vector<metrics::MetricsReport> reports;
  for (std::size_t i = 0; i < o.inputs.size(); ++i) {
    reports.push_back(report_for(o.inputs[i], o.language, o.snapshots.empty() ? "" : o.snapshots[i]));
  }
  out << metrics::render_table(reports);
  ojson j;
  j["reports"] = ojson::array();
  for (const auto& r : reports) j["reports"].push_back(metrics::to_json(r));
  if (reports.size() >= 2) {
    j["deltas"] = ojson::array();
    for (std::size_t i = 1; i < reports.size(); ++i) {
      metrics::SnapshotDelta d;
      try {
        d = metrics::compare_snapshots(reports[i - 1], reports[i]);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      out << metrics::render_delta(d);
      j["deltas"].push_back(metrics::to_json(d));
    }
  }
  if (!o.json_out.empty()) write_file_atomic(o.json_out, j.dump(2) + "\n");
  return kOk;
}

void add_classify_options(CLI::App* cmd, ClassifyOptions& c) {
  cmd->add_option("--news-domains", c.news_lists, "News domain list (repeatable); defaults to the shipped lists");
  cmd->add_option("--snapshot", c.snapshot, "Snapshot label recorded in the metrics report");
}

void add_lookup_options(CLI::App* cmd, LookupOptions& l) {
  cmd->add_option("--endpoint", l.endpoints, "crossref, books or mock (repeatable)");
  cmd->add_option("--mock-db", l.mock_db, "Records served by the mock endpoint (JSON)");
  cmd->add_option("--threshold", l.threshold, "Largest accepted normalized title distance")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--batch-size", l.batch_size, "Requests per results file and checkpoint")->check(CLI::PositiveNumber);
  cmd->add_option("--checkpoint-dir", l.checkpoint_dir, "Where batches and checkpoints go (default <out>/checkpoints)");
  cmd->add_option("--in-flight", l.in_flight, "Concurrent requests per batch")->check(CLI::PositiveNumber);
  cmd->add_option("--rate", l.rate, "Requests per second per endpoint (0 disables the limit)");
  cmd->add_option("--max-attempts", l.max_attempts, "Attempts per request before it is recorded as failed")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", l.seed, "Seed for backoff jitter");
  cmd->add_option("--failure-budget", l.failure_budget,
                  "Largest tolerated number of failed requests; exceeding it exits with code 4");
  cmd->add_option("--contact", l.contact, "Contact address sent to the endpoints")->envname("WIKICITE_CONTACT");
  cmd->add_option("--books-key", l.books_key, "Books API key")->envname("WIKICITE_BOOKS_API_KEY");
  cmd->add_option("--crossref-url", l.crossref_url, "Crossref base URL")->envname("WIKICITE_CROSSREF_URL");
  cmd->add_option("--books-url", l.books_url, "Books base URL")->envname("WIKICITE_BOOKS_URL");
  cmd->add_option("--stop-after-batches", l.stop_after_batches)->group("");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Extract, harmonize, classify and augment citations from Wikipedia dumps", "wikicite"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file; flags override it");
  app.set_version_flag("--version", "wikicite 1.0");

  GlobalOptions g;
  g.data_dir = pipeline::default_data_dir();
  g.jobs = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--data-dir", g.data_dir, "Directory with tables, suffix list, redirects and news lists")
      ->envname("WIKICITE_DATA_DIR");
  app.add_option("--jobs,-j", g.jobs, "Worker threads (default: available cores)")->check(CLI::PositiveNumber);

  ExtractOptions e;
  ClassifyOptions c;
  LookupOptions l;
  LookupOptions lx;  // lookup options for extract --all
  ClassifyOptions cx;
  StatsOptions s;

  auto* extract = app.add_subcommand("extract", "Dump -> harmonized citation dataset");
  extract->add_option("dump", e.dump, "pages-articles XML dump, plain or bz2")->required();
  extract->add_option("--language,-l", e.language, "ISO-639-1 code of the edition")->required();
  extract->add_option("--out,-o", e.out, "Output directory")->required();
  extract->add_option("--format", e.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  extract->add_option("--tables", e.tables_dir, "Directory of translation tables");
  extract->add_option("--suffix-list", e.suffix_list, "Public suffix list");
  extract->add_option("--redirects", e.redirects, "Redirect keywords per language (JSON)");
  extract->add_option("--max-rows", e.max_rows, "Rows per output file (0: no limit)");
  extract->add_flag("--extended", e.extended, "JSONL only: include all template properties");
  extract->add_flag("--skip-bad-pages", e.skip_bad_pages, "Skip malformed pages instead of aborting");
  extract->add_option("--compression", e.compression, "auto, none or bz2")
      ->check(CLI::IsMember({"auto", "none", "bz2"}));
  extract->add_option("--top", e.top, "Rows in the template frequency table");
  extract->add_flag("--refs-only", e.refs_only, "Keep only templates inside <ref> elements");
  extract->add_flag("--all", e.all, "Also classify, and run lookup when --endpoint is given");
  add_classify_options(extract, cx);
  add_lookup_options(extract, lx);

  auto* classify = app.add_subcommand("classify", "Label a dataset and report scores");
  classify->add_option("in", c.in, "Dataset file or directory")->required()->check(CLI::ExistingPath);
  classify->add_option("--out,-o", c.out, "Output directory")->required();
  classify->add_option("--format", c.format, "csv or jsonl (default: input format)")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  classify->add_option("--max-rows", c.max_rows, "Rows per output file (0: no limit)");
  classify->add_flag("--extended", c.extended, "JSONL only: include all template properties");
  classify->add_option("--language,-l", c.language, "Language recorded in the metrics report");
  add_classify_options(classify, c);

  auto* lookup_cmd = app.add_subcommand("lookup", "Acquire identifiers for book and journal citations");
  lookup_cmd->add_option("in", l.in, "Dataset file or directory")->required()->check(CLI::ExistingPath);
  lookup_cmd->add_option("--out,-o", l.out, "Output directory")->required();
  lookup_cmd->add_option("--format", l.format, "csv or jsonl (default: input format)")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  lookup_cmd->add_option("--max-rows", l.max_rows, "Rows per output file (0: no limit)");
  lookup_cmd->add_flag("--extended", l.extended, "JSONL only: include all template properties");
  add_lookup_options(lookup_cmd, l);

  auto* stats = app.add_subcommand("stats", "Score tables and snapshot deltas");
  stats->add_option("inputs", s.inputs, "Labeled datasets or metrics.json files, oldest first")
      ->required()
      ->check(CLI::ExistingPath);
  stats->add_option("--snapshot", s.snapshots, "Label per input (repeatable)");
  stats->add_option("--language,-l", s.language, "Language label");
  stats->add_option("--json", s.json_out, "Also write the reports as JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << app.version() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  std::vector<std::string> command_line{"wikicite"};
  command_line.insert(command_line.end(), args.begin(), args.end());
  try {
    if (*extract) {
      lx.format = e.format;
      return cmd_extract(e, cx, lx, g, command_line, out, err);
    }
    if (*classify) return cmd_classify(c, g, command_line, out, err);
    if (*lookup_cmd) return cmd_lookup(l, g, command_line, out);
    if (*stats) return cmd_stats(s, out);
  } catch (const dump::DumpParseError& ex) {
    err << "input error: " << ex.what() << " (byte " << ex.byte_offset() << ", " << ex.element_path() << ")\n";
    return kInputError;
  } catch (const InputError& ex) {
    err << "input error: " << ex.what() << "\n";
    return kInputError;
  } catch (const ConfigError& ex) {
    err << "config error: " << ex.what() << "\n";
    return kConfigError;
  } catch (const EndpointError& ex) {
    err << "endpoint error: " << ex.what() << "\n";
    return kEndpointFailure;
  } catch (const fs::filesystem_error& ex) {
    err << "input error: " << ex.what() << "\n";
    return kInputError;
  }
  return kOk;
}

}  // namespace wikicite::cli
