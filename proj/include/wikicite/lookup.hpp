#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "wikicite/output.hpp"

namespace wikicite::lookup {

enum class Target { crossref, books };
std::string_view target_name(Target t);

struct LookupRequest {
  std::string citation_key;
  std::string title;
  std::vector<std::string> authors;
  Target target = Target::crossref;
  bool operator==(const LookupRequest&) const = default;
};

/// Row index rendered as a 12-digit, zero-padded key.
std::string citation_key(std::size_t row_index);
std::optional<std::size_t> row_index_of(std::string_view key);

/// cite book goes to the books endpoint; cite journal, cite encyclopedia and
/// cite proceedings go to crossref. Only rows with no identifiers and a
/// non-blank title qualify.
std::optional<Target> target_for(std::string_view type_of_citation);
std::optional<LookupRequest> request_for(const output::DatasetRow& row, std::size_t row_index);
std::vector<LookupRequest> select_lookup_candidates(const std::vector<output::DatasetRow>& rows);

// Title matching

/// Case-folded, punctuation stripped, whitespace collapsed code points.
std::u32string normalize_title(std::string_view title);
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
/// Levenshtein distance of the normalized forms.
std::size_t edit_distance(std::string_view a, std::string_view b);

struct MatchScore {
  std::size_t distance = 0;
  double normalized = 0.0;
  bool accepted = false;
};

/// normalized = distance / max(len(a'), len(b'), 1); accepted iff normalized <= threshold.
MatchScore validate_match(std::string_view requested, std::string_view returned, double threshold);

// Endpoints

struct Candidate {
  std::string title;
  output::IdPairs ids;
};

struct SearchResult {
  enum class Status { found, not_found, error };
  Status status = Status::not_found;
  std::optional<Candidate> candidate;
  std::string error;
  bool retryable = false;

  static SearchResult found(Candidate c) { return {Status::found, std::move(c), {}, false}; }
  static SearchResult none() { return {Status::not_found, std::nullopt, {}, false}; }
  static SearchResult failure(std::string message, bool retryable) {
    return {Status::error, std::nullopt, std::move(message), retryable};
  }
};

class BibliographicSearch {
 public:
  virtual ~BibliographicSearch() = default;
  /// Must be safe to call from several threads.
  virtual SearchResult search(const LookupRequest& request) = 0;
  virtual std::string name() const = 0;
};

/// Deterministic in-process endpoint. Returns the stored record whose
/// normalized title is closest to the request (ties broken by insertion
/// order), so near misses come back as rejected matches like a real search.
class MockSearch : public BibliographicSearch {
 public:
  void add(std::string title, output::IdPairs ids);
  /// The next `times` requests for this title fail with a retryable error.
  void fail_title(const std::string& title, int times);
  /// When false, only exact normalized-title matches are returned.
  void set_best_match(bool best_match) { best_match_ = best_match; }

  /// {"records": [{"title": ..., "ids": [[scheme, value], ...]}], "best_match": bool}
  static std::unique_ptr<MockSearch> from_json(const nlohmann::json& j);
  static std::unique_ptr<MockSearch> load(const std::filesystem::path& path);

  SearchResult search(const LookupRequest& request) override;
  std::string name() const override { return "mock"; }

  std::vector<std::string> request_log() const;  // citation keys, in arrival order
  std::size_t request_count() const;

 private:
  struct Record {
    Candidate candidate;
    std::u32string normalized;
  };
  std::vector<Record> records_;
  bool best_match_ = true;
  mutable std::mutex mu_;
  std::map<std::u32string, int> failures_;
  std::vector<std::string> log_;
};

struct HttpOptions {
  std::string base_url;
  std::string contact;  // mailto for crossref's polite pool, also sent in User-Agent
  std::string api_key;
  std::chrono::milliseconds timeout{10000};
};

/// /works?query.bibliographic=...&rows=1
class CrossrefSearch : public BibliographicSearch {
 public:
  explicit CrossrefSearch(HttpOptions options);
  SearchResult search(const LookupRequest& request) override;
  std::string name() const override { return "crossref"; }
  static SearchResult parse_response(const nlohmann::json& body);

 private:
  HttpOptions options_;
};

/// /books/v1/volumes?q=intitle:...&maxResults=1
class BooksSearch : public BibliographicSearch {
 public:
  explicit BooksSearch(HttpOptions options);
  SearchResult search(const LookupRequest& request) override;
  std::string name() const override { return "books"; }
  static SearchResult parse_response(const nlohmann::json& body);

 private:
  HttpOptions options_;
};

/// Percent-encodes everything outside RFC 3986 unreserved characters.
std::string url_encode(std::string_view s);

using Sleeper = std::function<void(std::chrono::milliseconds)>;
using Clock = std::function<std::chrono::steady_clock::time_point()>;

struct PolicyOptions {
  double requests_per_second = 1.0;  // <= 0 disables rate limiting
  int max_attempts = 4;
  std::chrono::milliseconds base_delay{500};
  std::chrono::milliseconds max_delay{30000};
  double jitter = 0.5;  // extra delay up to this fraction of the backoff
  std::uint64_t seed = 0;
};

/// Rate limiting and bounded retries with exponential backoff around another
/// endpoint. Jitter is drawn from a generator seeded by (seed, key, attempt),
/// so delays do not depend on thread scheduling.
class PoliteSearch : public BibliographicSearch {
 public:
  PoliteSearch(BibliographicSearch& inner, PolicyOptions options, Sleeper sleeper = {}, Clock clock = {});
  SearchResult search(const LookupRequest& request) override;
  std::string name() const override { return inner_.name(); }

  /// Delay before retry number `attempt` (1-based).
  std::chrono::milliseconds backoff(const std::string& key, int attempt) const;

 private:
  void wait_for_slot();

  BibliographicSearch& inner_;
  PolicyOptions options_;
  Sleeper sleep_;
  Clock now_;
  std::mutex mu_;
  std::optional<std::chrono::steady_clock::time_point> next_slot_;
};

// Batch runner

enum class Outcome { accepted, rejected, no_result, transport_error };
std::string_view outcome_name(Outcome o);
std::optional<Outcome> parse_outcome(std::string_view name);

struct LookupMatch {
  output::IdPairs acquired_ids;  // empty unless accepted
  std::string matched_title;
  std::size_t distance = 0;
  double normalized_distance = 0.0;
  bool accepted = false;
};

struct RequestResult {
  std::string citation_key;
  Target target = Target::crossref;
  Outcome outcome = Outcome::no_result;
  std::optional<LookupMatch> match;
  std::string error;
};

RequestResult resolve(const LookupRequest& request, BibliographicSearch& endpoint, double threshold);

struct LookupCounts {
  std::size_t requests = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t no_result = 0;
  std::size_t transport_error = 0;
  void add(Outcome o);
  LookupCounts& operator+=(const LookupCounts& o);
  bool operator==(const LookupCounts&) const = default;
};

struct Endpoints {
  BibliographicSearch* crossref = nullptr;
  BibliographicSearch* books = nullptr;
  BibliographicSearch& for_target(Target t) const;
};

struct LookupConfig {
  std::size_t batch_size = 1000;
  double threshold = 0.1;
  std::filesystem::path checkpoint_dir;
  std::size_t in_flight = 1;
  /// Stop after this many newly processed batches; simulates an interrupted run.
  std::optional<std::size_t> stop_after_batches;
};

struct LookupSummary {
  std::size_t batches_total = 0;
  std::size_t batches_processed = 0;
  std::size_t batches_skipped = 0;
  bool complete = false;
  LookupCounts counts;  // over all batches, including skipped ones
};

std::string batch_file_name(std::size_t index);
std::string checkpoint_file_name(std::size_t index);

/// Requests are stable-sorted by citation key and cut into batches. After
/// each batch its results file and then its checkpoint are written. Batches
/// with a matching checkpoint are skipped; a checkpoint for different keys,
/// batch size or threshold is a ConfigError.
LookupSummary run_lookup(std::vector<LookupRequest> requests, const Endpoints& endpoints, const LookupConfig& config);

nlohmann::ordered_json result_to_json(const RequestResult& r);
RequestResult result_from_json(const nlohmann::json& j);

/// All results recorded in a checkpoint directory, in key order.
std::vector<RequestResult> read_results(const std::filesystem::path& checkpoint_dir);

/// Copies acquired ids of accepted matches into the rows they came from.
/// Returns the number of augmented rows.
std::size_t apply_results(std::vector<output::DatasetRow>& rows, const std::vector<RequestResult>& results);

}  // namespace wikicite::lookup
