#include "wikicite/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace wikicite::metrics {

namespace {

__int128 pow10(int n) {
  __int128 p = 1;
  for (int i = 0; i < n; ++i) p *= 10;
  return p;
}

std::string to_string(__int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  std::string s;
  while (v != 0) {
    int digit = static_cast<int>(v % 10);
    s.push_back(static_cast<char>('0' + (neg ? -digit : digit)));
    v /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

}  // namespace

Fraction::Fraction(__int128 n, __int128 d) : num(n), den(d) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
}

std::string round_half_even(__int128 num, __int128 den, int decimals) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  bool neg = num < 0;
  __int128 a = neg ? -num : num;
  __int128 scaled = a * pow10(decimals);
  __int128 q = scaled / den;
  __int128 r = scaled % den;
  if (2 * r > den || (2 * r == den && q % 2 == 1)) ++q;
  std::string digits = to_string(q);
  if (decimals > 0) {
    if (static_cast<int>(digits.size()) <= decimals) digits.insert(0, decimals + 1 - digits.size(), '0');
    digits.insert(digits.size() - decimals, ".");
  }
  if (neg && q != 0) digits.insert(0, "-");
  return digits;
}

std::string Fraction::format(int decimals) const { return round_half_even(num, den, decimals); }
std::string Fraction::percent(int decimals) const { return round_half_even(num * 100, den, decimals); }

MetricsReport MetricsReport::from_counts(std::string language, std::string snapshot, std::uint64_t total,
                                         std::uint64_t journals, std::uint64_t books, std::uint64_t news) {
  if (journals + books + news > total) throw std::invalid_argument("class counts exceed total");
  MetricsReport r;
  r.language = std::move(language);
  r.snapshot = std::move(snapshot);
  r.total = total;
  r.journals = journals;
  r.books = books;
  r.news = news;
  r.other = total - journals - books - news;
  return r;
}

std::optional<Fraction> MetricsReport::sci_score() const {
  if (total == 0) return std::nullopt;
  return Fraction(journals, total);
}

std::optional<Fraction> MetricsReport::sci_score2() const {
  if (total == 0) return std::nullopt;
  return Fraction(scientific(), total);
}

std::optional<Fraction> MetricsReport::rel_score() const {
  if (total == 0) return std::nullopt;
  return Fraction(reliable(), total);
}

void MetricsReport::add(classify::Label label) {
  ++total;
  switch (label) {
    case classify::Label::journal: ++journals; break;
    case classify::Label::book: ++books; break;
    case classify::Label::news: ++news; break;
    case classify::Label::other: ++other; break;
  }
}

void MetricsReport::merge(const MetricsReport& o) {
  total += o.total;
  journals += o.journals;
  books += o.books;
  news += o.news;
  other += o.other;
}

SnapshotDelta compare_snapshots(const MetricsReport& a, const MetricsReport& b) {
  if (a.language != b.language) {
    throw std::invalid_argument("cannot compare snapshots of '" + a.language + "' and '" + b.language + "'");
  }
  SnapshotDelta d;
  d.language = a.language;
  d.before_snapshot = a.snapshot;
  d.after_snapshot = b.snapshot;
  auto field = [&](std::string name, std::uint64_t x, std::uint64_t y) {
    FieldDelta f{std::move(name), x, y, std::nullopt};
    if (x != 0) f.change = Fraction(static_cast<__int128>(y) - static_cast<__int128>(x), x);
    d.fields.push_back(std::move(f));
  };
  field("total", a.total, b.total);
  field("journals", a.journals, b.journals);
  field("books", a.books, b.books);
  field("news", a.news, b.news);
  field("scientific", a.scientific(), b.scientific());
  field("reliable", a.reliable(), b.reliable());

  auto score = [&](std::string name, const std::optional<Fraction>& x, const std::optional<Fraction>& y) {
    ScoreDelta s{std::move(name), std::nullopt};
    if (x && y) s.difference = Fraction(y->num * x->den - x->num * y->den, x->den * y->den);
    d.scores.push_back(std::move(s));
  };
  score("sci_score", a.sci_score(), b.sci_score());
  score("sci_score2", a.sci_score2(), b.sci_score2());
  score("rel_score", a.rel_score(), b.rel_score());
  return d;
}

std::string format_change(const std::optional<Fraction>& change) {
  if (!change) return "n/a";
  std::string s = change->percent(1);
  if (s != "0.0" && s.front() != '-') s.insert(0, "+");
  return s + "%";
}

namespace {

nlohmann::ordered_json score_json(const std::optional<Fraction>& f) {
  if (!f) return nullptr;
  return std::stod(f->percent(2));
}

nlohmann::ordered_json exact_json(const std::optional<Fraction>& f) {
  if (!f) return nullptr;
  return to_string(f->num) + "/" + to_string(f->den);
}

std::string group_thousands(std::uint64_t v) {
  std::string s = std::to_string(v);
  for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3) s.insert(static_cast<std::size_t>(i), ",");
  return s;
}

std::string render(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) line += "  ";
      // first column left-aligned, numbers right-aligned
      if (i == 0) line += row[i] + std::string(width[i] - row[i].size(), ' ');
      else line += std::string(width[i] - row[i].size(), ' ') + row[i];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

}  // namespace

nlohmann::ordered_json to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["language"] = r.language;
  j["snapshot"] = r.snapshot;
  j["total"] = r.total;
  j["journals"] = r.journals;
  j["books"] = r.books;
  j["news"] = r.news;
  j["other"] = r.other;
  j["scientific"] = r.scientific();
  j["reliable"] = r.reliable();
  j["sci_score"] = score_json(r.sci_score());
  j["sci_score2"] = score_json(r.sci_score2());
  j["rel_score"] = score_json(r.rel_score());
  j["exact"] = {{"sci_score", exact_json(r.sci_score())},
                {"sci_score2", exact_json(r.sci_score2())},
                {"rel_score", exact_json(r.rel_score())}};
  return j;
}

nlohmann::ordered_json to_json(const SnapshotDelta& d) {
  nlohmann::ordered_json j;
  j["language"] = d.language;
  j["before"] = d.before_snapshot;
  j["after"] = d.after_snapshot;
  nlohmann::ordered_json fields = nlohmann::ordered_json::object();
  for (const auto& f : d.fields) {
    fields[f.field] = {{"before", f.before},
                       {"after", f.after},
                       {"change_percent", f.change ? nlohmann::ordered_json(std::stod(f.change->percent(1)))
                                                   : nlohmann::ordered_json(nullptr)}};
  }
  j["fields"] = fields;
  nlohmann::ordered_json scores = nlohmann::ordered_json::object();
  for (const auto& s : d.scores) {
    scores[s.score] = {{"difference_pp", score_json(s.difference)}, {"exact", exact_json(s.difference)}};
  }
  j["scores"] = scores;
  return j;
}

MetricsReport metrics_from_json(const nlohmann::json& j) {
  return MetricsReport::from_counts(j.value("language", ""), j.value("snapshot", ""), j.at("total").get<std::uint64_t>(),
                                    j.at("journals").get<std::uint64_t>(), j.at("books").get<std::uint64_t>(),
                                    j.at("news").get<std::uint64_t>());
}

std::string render_table(const std::vector<MetricsReport>& reports) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Corpus", "Citations", "Journals", "Books", "News", "Scientific", "Reliable", "Sci score",
                  "Sci score 2", "Rel score"});
  auto pct = [](const std::optional<Fraction>& f) { return f ? f->percent(2) : std::string("n/a"); };
  for (const auto& r : reports) {
    std::string label = r.language;
    if (!r.snapshot.empty()) label += label.empty() ? r.snapshot : " " + r.snapshot;
    rows.push_back({label, group_thousands(r.total), group_thousands(r.journals), group_thousands(r.books),
                    group_thousands(r.news), group_thousands(r.scientific()), group_thousands(r.reliable()),
                    pct(r.sci_score()), pct(r.sci_score2()), pct(r.rel_score())});
  }
  return render(rows);
}

std::string render_delta(const SnapshotDelta& d) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Change", "Citations", "Journals", "Books", "News", "Scientific", "Reliable", "Sci score",
                  "Sci score 2", "Rel score"});
  std::vector<std::string> row{d.before_snapshot + " -> " + d.after_snapshot};
  for (const auto& f : d.fields) row.push_back(format_change(f.change));
  for (const auto& s : d.scores) row.push_back(s.difference ? s.difference->percent(2) : "n/a");
  rows.push_back(std::move(row));
  return render(rows);
}

}  // namespace wikicite::metrics
