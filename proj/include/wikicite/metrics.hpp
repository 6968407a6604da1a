#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "wikicite/classify.hpp"

namespace wikicite::metrics {

/// Exact rational number with a positive denominator.
struct Fraction {
  __int128 num = 0;
  __int128 den = 1;

  Fraction() = default;
  Fraction(__int128 n, __int128 d);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  /// Value rounded half-even to `decimals` places, e.g. "5.02", "-0.07".
  std::string format(int decimals) const;
  /// Same as format() applied to value * 100.
  std::string percent(int decimals) const;
  bool operator==(const Fraction& o) const { return num * o.den == o.num * den; }
};

/// Half-even rounding of num/den to `decimals` places, rendered as decimal text.
std::string round_half_even(__int128 num, __int128 den, int decimals);

struct MetricsReport {
  std::string language;
  std::string snapshot;
  std::uint64_t total = 0;
  std::uint64_t journals = 0;
  std::uint64_t books = 0;
  std::uint64_t news = 0;
  std::uint64_t other = 0;

  /// other = total - journals - books - news. Throws std::invalid_argument
  /// when the class counts exceed the total.
  static MetricsReport from_counts(std::string language, std::string snapshot, std::uint64_t total,
                                   std::uint64_t journals, std::uint64_t books, std::uint64_t news);

  std::uint64_t scientific() const { return journals + books; }
  std::uint64_t reliable() const { return journals + books + news; }

  /// Fractions of total; absent when total is 0.
  std::optional<Fraction> sci_score() const;
  std::optional<Fraction> sci_score2() const;
  std::optional<Fraction> rel_score() const;

  void add(classify::Label label);
  /// Associative, commutative merge of counts. Labels are kept from *this.
  void merge(const MetricsReport& other);

  bool operator==(const MetricsReport&) const = default;
};

template <typename Range>
MetricsReport compute_metrics(const Range& labels, std::string language, std::string snapshot) {
  MetricsReport r;
  r.language = std::move(language);
  r.snapshot = std::move(snapshot);
  for (classify::Label l : labels) r.add(l);
  return r;
}

struct FieldDelta {
  std::string field;
  std::uint64_t before = 0;
  std::uint64_t after = 0;
  /// (after - before) / before; absent when before is 0.
  std::optional<Fraction> change;
};

struct ScoreDelta {
  std::string score;
  /// after - before, exact; absent when either score is absent.
  std::optional<Fraction> difference;
};

struct SnapshotDelta {
  std::string language;
  std::string before_snapshot;
  std::string after_snapshot;
  std::vector<FieldDelta> fields;   // total, journals, books, news, scientific, reliable
  std::vector<ScoreDelta> scores;   // sci_score, sci_score2, rel_score
};

/// Throws std::invalid_argument when the languages differ.
SnapshotDelta compare_snapshots(const MetricsReport& a, const MetricsReport& b);

/// Signed percentage with one decimal, "+10.1%", "-0.5%", "0.0%".
std::string format_change(const std::optional<Fraction>& change);

nlohmann::ordered_json to_json(const MetricsReport& r);
nlohmann::ordered_json to_json(const SnapshotDelta& d);
MetricsReport metrics_from_json(const nlohmann::json& j);

/// Aligned plain-text table in the column order Citations, Journals, Books,
/// News, Scientific, Reliable, Sci score, Sci score 2, Rel score.
std::string render_table(const std::vector<MetricsReport>& reports);
std::string render_delta(const SnapshotDelta& d);

}  // namespace wikicite::metrics
