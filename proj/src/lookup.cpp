#include "wikicite/lookup.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <random>
#include <thread>

#include "wikicite/digest.hpp"
#include "wikicite/errors.hpp"
#include "wikicite/files.hpp"
#include "wikicite/text.hpp"

namespace wikicite::lookup {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string_view target_name(Target t) { return t == Target::books ? "books" : "crossref"; }

std::string citation_key(std::size_t row_index) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%012zu", row_index);
  return buf;
}

std::optional<std::size_t> row_index_of(std::string_view key) {
  if (key.empty() || key.size() > 18) return std::nullopt;
  std::size_t v = 0;
  for (char c : key) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  return v;
}

std::optional<Target> target_for(std::string_view type) {
  if (type == "cite book") return Target::books;
  if (type == "cite journal" || type == "cite encyclopedia" || type == "cite proceedings") return Target::crossref;
  return std::nullopt;
}

std::optional<LookupRequest> request_for(const output::DatasetRow& row, std::size_t row_index) {
  auto target = target_for(row.type_of_citation);
  if (!target || !row.id_list.empty() || !row.title) return std::nullopt;
  std::string_view title = text::trim(*row.title);
  if (title.empty()) return std::nullopt;
  return LookupRequest{citation_key(row_index), std::string(title), row.authors, *target};
}

std::vector<LookupRequest> select_lookup_candidates(const std::vector<output::DatasetRow>& rows) {
  std::vector<LookupRequest> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (auto r = request_for(rows[i], i)) out.push_back(std::move(*r));
  }
  return out;
}

// Title matching

std::u32string normalize_title(std::string_view title) {
  std::u32string out;
  bool pending_space = false;
  for (char32_t cp : text::decode_utf8(title)) {
    if (text::is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (text::is_punct(cp)) continue;
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(text::to_lower(cp));
  }
  return out;
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  return levenshtein(normalize_title(a), normalize_title(b));
}

MatchScore validate_match(std::string_view requested, std::string_view returned, double threshold) {
  if (threshold < 0.0 || threshold > 1.0) throw std::invalid_argument("threshold must be within [0, 1]");
  std::u32string a = normalize_title(requested);
  std::u32string b = normalize_title(returned);
  MatchScore s;
  s.distance = levenshtein(a, b);
  std::size_t denom = std::max({a.size(), b.size(), std::size_t{1}});
  s.normalized = static_cast<double>(s.distance) / static_cast<double>(denom);
  s.accepted = s.normalized <= threshold;
  return s;
}

// Mock endpoint

void MockSearch::add(std::string title, output::IdPairs ids) {
  std::u32string norm = normalize_title(title);
  records_.push_back(Record{Candidate{std::move(title), std::move(ids)}, std::move(norm)});
}

void MockSearch::fail_title(const std::string& title, int times) {
  std::lock_guard lock(mu_);
  failures_[normalize_title(title)] = times;
}

std::unique_ptr<MockSearch> MockSearch::from_json(const nlohmann::json& j) {
  auto mock = std::make_unique<MockSearch>();
  try {
    for (const auto& r : j.at("records")) {
      output::IdPairs ids;
      for (const auto& p : r.at("ids")) ids.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
      mock->add(r.at("title").get<std::string>(), std::move(ids));
    }
    if (j.contains("best_match")) mock->set_best_match(j["best_match"].get<bool>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed mock endpoint database: ") + e.what());
  }
  return mock;
}

std::unique_ptr<MockSearch> MockSearch::load(const fs::path& path) {
  try {
    return from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("mock endpoint database " + path.string() + " is not valid JSON: " + e.what());
  }
}

SearchResult MockSearch::search(const LookupRequest& request) {
  std::u32string norm = normalize_title(request.title);
  {
    std::lock_guard lock(mu_);
    log_.push_back(request.citation_key);
    auto it = failures_.find(norm);
    if (it != failures_.end() && it->second > 0) {
      --it->second;
      return SearchResult::failure("mock: simulated outage", true);
    }
  }
  const Record* best = nullptr;
  std::size_t best_distance = 0;
  for (const auto& r : records_) {
    std::size_t d = levenshtein(norm, r.normalized);
    if (best == nullptr || d < best_distance) {
      best = &r;
      best_distance = d;
    }
    if (d == 0) break;
  }
  if (best == nullptr || (!best_match_ && best_distance != 0)) return SearchResult::none();
  return SearchResult::found(best->candidate);
}

std::vector<std::string> MockSearch::request_log() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::size_t MockSearch::request_count() const {
  std::lock_guard lock(mu_);
  return log_.size();
}

// Politeness

PoliteSearch::PoliteSearch(BibliographicSearch& inner, PolicyOptions options, Sleeper sleeper, Clock clock)
    : inner_(inner), options_(options), sleep_(std::move(sleeper)), now_(std::move(clock)) {
  if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  if (!now_) now_ = [] { return std::chrono::steady_clock::now(); };
  if (options_.max_attempts < 1) options_.max_attempts = 1;
}

void PoliteSearch::wait_for_slot() {
  if (options_.requests_per_second <= 0) return;
  auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / options_.requests_per_second));
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mu_);
    auto now = now_();
    slot = next_slot_ && *next_slot_ > now ? *next_slot_ : now;
    next_slot_ = slot + interval;
  }
  auto now = now_();
  if (slot > now) {
    auto wait = std::chrono::ceil<std::chrono::milliseconds>(slot - now);
    sleep_(wait);
  }
}

std::chrono::milliseconds PoliteSearch::backoff(const std::string& key, int attempt) const {
  double base = static_cast<double>(options_.base_delay.count());
  double delay = std::min(static_cast<double>(options_.max_delay.count()), base * std::pow(2.0, attempt - 1));
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (char c : key) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  std::mt19937_64 rng(options_.seed ^ h ^ (static_cast<std::uint64_t>(attempt) * 0x9E3779B97F4A7C15ull));
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return std::chrono::milliseconds(static_cast<std::int64_t>(delay * (1.0 + options_.jitter * u)));
}

SearchResult PoliteSearch::search(const LookupRequest& request) {
  SearchResult last;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    if (attempt > 1) sleep_(backoff(request.citation_key, attempt - 1));
    wait_for_slot();
    last = inner_.search(request);
    if (last.status != SearchResult::Status::error || !last.retryable) return last;
  }
  last.error += " (gave up after " + std::to_string(options_.max_attempts) + " attempts)";
  return last;
}

// Batches

std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::accepted: return "accepted";
    case Outcome::rejected: return "rejected";
    case Outcome::no_result: return "no_result";
    case Outcome::transport_error: return "transport_error";
  }
  return "no_result";
}

std::optional<Outcome> parse_outcome(std::string_view name) {
  for (Outcome o : {Outcome::accepted, Outcome::rejected, Outcome::no_result, Outcome::transport_error}) {
    if (outcome_name(o) == name) return o;
  }
  return std::nullopt;
}

RequestResult resolve(const LookupRequest& request, BibliographicSearch& endpoint, double threshold) {
  RequestResult r;
  r.citation_key = request.citation_key;
  r.target = request.target;
  SearchResult s = endpoint.search(request);
  if (s.status == SearchResult::Status::error) {
    r.outcome = Outcome::transport_error;
    r.error = s.error;
    return r;
  }
  if (s.status == SearchResult::Status::not_found || !s.candidate || s.candidate->ids.empty()) {
    r.outcome = Outcome::no_result;
    return r;
  }
  MatchScore score = validate_match(request.title, s.candidate->title, threshold);
  LookupMatch m;
  m.matched_title = s.candidate->title;
  m.distance = score.distance;
  m.normalized_distance = score.normalized;
  m.accepted = score.accepted;
  if (score.accepted) m.acquired_ids = s.candidate->ids;
  r.outcome = score.accepted ? Outcome::accepted : Outcome::rejected;
  r.match = std::move(m);
  return r;
}

void LookupCounts::add(Outcome o) {
  ++requests;
  switch (o) {
    case Outcome::accepted: ++accepted; break;
    case Outcome::rejected: ++rejected; break;
    case Outcome::no_result: ++no_result; break;
    case Outcome::transport_error: ++transport_error; break;
  }
}

LookupCounts& LookupCounts::operator+=(const LookupCounts& o) {
  requests += o.requests;
  accepted += o.accepted;
  rejected += o.rejected;
  no_result += o.no_result;
  transport_error += o.transport_error;
  return *this;
}

BibliographicSearch& Endpoints::for_target(Target t) const {
  BibliographicSearch* e = t == Target::books ? books : crossref;
  if (e == nullptr) throw ConfigError("no endpoint configured for " + std::string(target_name(t)));
  return *e;
}

std::string batch_file_name(std::size_t index) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "batch-%05zu.jsonl", index);
  return buf;
}

std::string checkpoint_file_name(std::size_t index) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "batch-%05zu.checkpoint.json", index);
  return buf;
}

namespace {

ojson ids_json(const output::IdPairs& ids) {
  ojson arr = ojson::array();
  for (const auto& [s, v] : ids) arr.push_back(ojson::array({s, v}));
  return arr;
}

ojson counts_json(const LookupCounts& c) {
  return {{"requests", c.requests},
          {"accepted", c.accepted},
          {"rejected", c.rejected},
          {"no_result", c.no_result},
          {"transport_error", c.transport_error}};
}

LookupCounts counts_from_json(const nlohmann::json& j) {
  LookupCounts c;
  c.requests = j.at("requests").get<std::size_t>();
  c.accepted = j.at("accepted").get<std::size_t>();
  c.rejected = j.at("rejected").get<std::size_t>();
  c.no_result = j.at("no_result").get<std::size_t>();
  c.transport_error = j.at("transport_error").get<std::size_t>();
  return c;
}

std::string keys_digest(const std::vector<LookupRequest>& reqs, std::size_t begin, std::size_t end) {
  Sha256 h;
  for (std::size_t i = begin; i < end; ++i) {
    h.update(reqs[i].citation_key);
    h.update("\n");
  }
  return h.finish();
}

}  // namespace

ojson result_to_json(const RequestResult& r) {
  ojson j;
  j["citation_key"] = r.citation_key;
  j["target"] = std::string(target_name(r.target));
  j["outcome"] = std::string(outcome_name(r.outcome));
  if (r.match) {
    j["matched_title"] = r.match->matched_title;
    j["distance"] = r.match->distance;
    j["normalized_distance"] = r.match->normalized_distance;
    j["accepted"] = r.match->accepted;
    j["acquired_id_list"] = ids_json(r.match->acquired_ids);
  } else {
    j["matched_title"] = nullptr;
    j["distance"] = nullptr;
    j["normalized_distance"] = nullptr;
    j["accepted"] = false;
    j["acquired_id_list"] = ojson::array();
  }
  j["error"] = r.error.empty() ? ojson(nullptr) : ojson(r.error);
  return j;
}

RequestResult result_from_json(const nlohmann::json& j) {
  RequestResult r;
  r.citation_key = j.at("citation_key").get<std::string>();
  r.target = j.at("target").get<std::string>() == "books" ? Target::books : Target::crossref;
  auto o = parse_outcome(j.at("outcome").get<std::string>());
  if (!o) throw InputError("unknown lookup outcome in results for " + r.citation_key);
  r.outcome = *o;
  if (!j.at("matched_title").is_null()) {
    LookupMatch m;
    m.matched_title = j["matched_title"].get<std::string>();
    m.distance = j.at("distance").get<std::size_t>();
    m.normalized_distance = j.at("normalized_distance").get<double>();
    m.accepted = j.at("accepted").get<bool>();
    for (const auto& p : j.at("acquired_id_list")) {
      m.acquired_ids.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
    }
    r.match = std::move(m);
  }
  if (j.contains("error") && j["error"].is_string()) r.error = j["error"].get<std::string>();
  return r;
}

LookupSummary run_lookup(std::vector<LookupRequest> requests, const Endpoints& endpoints,
                         const LookupConfig& config) {
  if (config.batch_size == 0) throw ConfigError("batch size must be at least 1");
  if (config.threshold < 0.0 || config.threshold > 1.0) throw ConfigError("threshold must be within [0, 1]");
  if (config.checkpoint_dir.empty()) throw ConfigError("a checkpoint directory is required");
  std::error_code ec;
  fs::create_directories(config.checkpoint_dir, ec);
  if (ec) throw ConfigError("cannot create checkpoint directory " + config.checkpoint_dir.string());

  std::stable_sort(requests.begin(), requests.end(),
                   [](const LookupRequest& a, const LookupRequest& b) { return a.citation_key < b.citation_key; });
  requests.erase(std::unique(requests.begin(), requests.end(),
                             [](const LookupRequest& a, const LookupRequest& b) {
                               return a.citation_key == b.citation_key;
                             }),
                 requests.end());

  LookupSummary summary;
  const std::size_t n = requests.size();
  summary.batches_total = (n + config.batch_size - 1) / config.batch_size;
  const std::size_t workers = std::max<std::size_t>(1, config.in_flight);

  for (std::size_t b = 0; b < summary.batches_total; ++b) {
    const std::size_t begin = b * config.batch_size;
    const std::size_t end = std::min(n, begin + config.batch_size);
    const std::string digest = keys_digest(requests, begin, end);
    const fs::path results_path = config.checkpoint_dir / batch_file_name(b);
    const fs::path checkpoint_path = config.checkpoint_dir / checkpoint_file_name(b);

    if (fs::exists(checkpoint_path)) {
      nlohmann::json cp;
      try {
        cp = nlohmann::json::parse(read_file(checkpoint_path));
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("corrupt checkpoint " + checkpoint_path.string() + ": " + e.what());
      }
      if (cp.value("completed_keys_digest", "") != digest || cp.value("batch_size", std::size_t{0}) != config.batch_size ||
          cp.value("threshold", -1.0) != config.threshold) {
        throw ConfigError("checkpoint " + checkpoint_path.string() +
                          " was written for different requests, batch size or threshold");
      }
      if (fs::exists(results_path)) {
        summary.counts += counts_from_json(cp.at("counts"));
        ++summary.batches_skipped;
        continue;
      }
    }

    if (config.stop_after_batches && summary.batches_processed >= *config.stop_after_batches) return summary;

    std::vector<RequestResult> results(end - begin);
    std::atomic<std::size_t> next{begin};
    auto work = [&] {
      for (std::size_t i = next++; i < end; i = next++) {
        results[i - begin] = resolve(requests[i], endpoints.for_target(requests[i].target), config.threshold);
      }
    };
    if (workers == 1 || end - begin == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < std::min(workers, end - begin); ++w) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }

    LookupCounts counts;
    std::string body;
    for (const auto& r : results) {
      counts.add(r.outcome);
      body += result_to_json(r).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
      body += '\n';
    }
    write_file_atomic(results_path, body);

    ojson cp;
    cp["batch_index"] = b;
    cp["first_key"] = requests[begin].citation_key;
    cp["last_key"] = requests[end - 1].citation_key;
    cp["completed"] = end - begin;
    cp["completed_keys_digest"] = digest;
    cp["batch_size"] = config.batch_size;
    cp["threshold"] = config.threshold;
    cp["output"] = batch_file_name(b);
    cp["results_digest"] = sha256_hex(body);
    cp["counts"] = counts_json(counts);
    write_file_atomic(checkpoint_path, cp.dump(2) + "\n");

    summary.counts += counts;
    ++summary.batches_processed;
  }
  summary.complete = true;
  return summary;
}

std::vector<RequestResult> read_results(const fs::path& checkpoint_dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(checkpoint_dir)) throw InputError("no checkpoint directory " + checkpoint_dir.string());
  for (const auto& entry : fs::directory_iterator(checkpoint_dir)) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("batch-") && name.ends_with(".jsonl")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RequestResult> out;
  for (const auto& f : files) {
    std::string data = read_file(f);
    std::size_t pos = 0;
    while (pos < data.size()) {
      std::size_t nl = data.find('\n', pos);
      if (nl == std::string::npos) nl = data.size();
      std::string_view line(data.data() + pos, nl - pos);
      pos = nl + 1;
      if (text::trim(line).empty()) continue;
      try {
        out.push_back(result_from_json(nlohmann::json::parse(line)));
      } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed lookup result in " + f.string() + ": " + e.what());
      }
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RequestResult& a, const RequestResult& b) { return a.citation_key < b.citation_key; });
  return out;
}

std::size_t apply_results(std::vector<output::DatasetRow>& rows, const std::vector<RequestResult>& results) {
  std::size_t augmented = 0;
  for (const auto& r : results) {
    if (r.outcome != Outcome::accepted || !r.match || r.match->acquired_ids.empty()) continue;
    auto idx = row_index_of(r.citation_key);
    if (!idx || *idx >= rows.size()) {
      throw InputError("lookup result " + r.citation_key + " does not refer to a row of this dataset");
    }
    auto& row = rows[*idx];
    if (!row.acquired_id_list.empty()) continue;
    row.acquired_id_list = r.match->acquired_ids;
    ++augmented;
  }
  return augmented;
}

}  // namespace wikicite::lookup
