#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wikicite/metrics.hpp"

using namespace wikicite;
using namespace wikicite::metrics;
using classify::Label;

namespace {

MetricsReport random_report(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> d(0, 1'000'000);
  std::uint64_t j = d(rng), b = d(rng), n = d(rng), o = d(rng);
  return MetricsReport::from_counts("en", "s", j + b + n + o, j, b, n);
}

}  // namespace

TEST_CASE("half-even rounding agrees with long division") {
  CHECK(round_half_even(5, 2, 0) == "2");
  CHECK(round_half_even(7, 2, 0) == "4");
  CHECK(round_half_even(1, 8, 2) == "0.12");
  CHECK(round_half_even(3, 8, 2) == "0.38");
  CHECK(round_half_even(-1, 8, 2) == "-0.12");
  CHECK(round_half_even(-1, 1000, 2) == "0.00");
  CHECK(round_half_even(995, 1000, 2) == "1.00");
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<long long> num(-2'000'000, 2'000'000);
  std::uniform_int_distribution<long long> den(1, 50'000);
  std::uniform_int_distribution<int> dec(0, 4);
  for (int i = 0; i < 20000; ++i) {
    long long n = num(rng), dd = den(rng);
    int k = dec(rng);
    CAPTURE(n);
    CAPTURE(dd);
    CAPTURE(k);
    CHECK(round_half_even(n, dd, k) == oracle::round_half_even(n, dd, k));
  }
}

TEST_CASE("scores for whole-corpus counts") {
  auto y2024 = MetricsReport::from_counts("en", "2024", 44'766'800, 2'248'748, 3'277'629, 10'958'151);
  CHECK(y2024.sci_score()->percent(2) == "5.02");
  CHECK(y2024.sci_score2()->percent(2) == "12.34");
  CHECK(y2024.rel_score()->percent(2) == "36.82");
  CHECK(y2024.scientific() == 5'526'377);
  CHECK(y2024.reliable() == 16'484'528);

  auto y2023 = MetricsReport::from_counts("en", "2023", 40'664'485, 2'052'172, 2'994'601, 9'926'598);
  CHECK(y2023.sci_score()->percent(2) == "5.05");
  CHECK(y2023.sci_score2()->percent(2) == "12.41");
  CHECK(y2023.rel_score()->percent(2) == "36.82");
  CHECK(y2023.scientific() == 5'046'773);

  auto ca = MetricsReport::from_counts("ca", "", 2'239'714, 105'125, 261'779, 423'241);
  CHECK(ca.sci_score()->percent(2) == "4.69");
  CHECK(ca.sci_score2()->percent(2) == "16.38");
  CHECK(ca.rel_score()->percent(2) == "35.28");
  CHECK(*ca.sci_score() == Fraction(105'125, 2'239'714));
}

TEST_CASE("degenerate corpora") {
  auto others = compute_metrics(std::vector<Label>(10, Label::other), "en", "");
  CHECK(others.sci_score()->percent(2) == "0.00");
  CHECK(others.rel_score()->percent(2) == "0.00");
  MetricsReport empty;
  CHECK_FALSE(empty.sci_score().has_value());
  CHECK_FALSE(empty.sci_score2().has_value());
  CHECK_FALSE(empty.rel_score().has_value());
  CHECK_THROWS_AS(MetricsReport::from_counts("en", "", 5, 3, 2, 1), std::invalid_argument);
}

TEST_CASE("invariants hold on random label streams") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 200; ++i) {
    std::vector<Label> labels(rng() % 500);
    for (auto& l : labels) l = static_cast<Label>(rng() % 4);
    auto r = compute_metrics(labels, "de", "x");
    CHECK(r.journals + r.books + r.news + r.other == r.total);
    CHECK(r.total == labels.size());
    CHECK(r.scientific() == r.journals + r.books);
    CHECK(r.reliable() == r.scientific() + r.news);
    if (r.total > 0) {
      double a = r.sci_score()->value(), b = r.sci_score2()->value(), c = r.rel_score()->value();
      CHECK(0.0 <= a);
      CHECK(a <= b);
      CHECK(b <= c);
      CHECK(c <= 1.0);
    }
    // order invariance
    std::shuffle(labels.begin(), labels.end(), rng);
    CHECK(compute_metrics(labels, "de", "x") == r);
  }
}

TEST_CASE("merge is associative and commutative") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 100; ++i) {
    auto a = random_report(rng), b = random_report(rng), c = random_report(rng);
    auto ab_c = a;
    ab_c.merge(b);
    ab_c.merge(c);
    auto bc = b;
    bc.merge(c);
    auto a_bc = a;
    a_bc.merge(bc);
    CHECK(ab_c == a_bc);
    auto ab = a;
    ab.merge(b);
    auto ba = b;
    ba.merge(a);
    ba.language = ab.language;
    ba.snapshot = ab.snapshot;
    CHECK(ab == ba);
  }
}

TEST_CASE("snapshot comparison") {
  auto a = MetricsReport::from_counts("en", "2023", 40'664'485, 2'052'172, 2'994'601, 9'926'598);
  auto b = MetricsReport::from_counts("en", "2024", 44'766'800, 2'248'748, 3'277'629, 10'958'151);
  auto d = compare_snapshots(a, b);
  REQUIRE(d.fields.size() == 6);
  CHECK(d.fields[0].field == "total");
  CHECK(*d.fields[0].change == Fraction(44'766'800 - 40'664'485, 40'664'485));
  // 10.088...% rounds to 10.1 at one decimal
  CHECK(format_change(d.fields[0].change) == "+10.1%");
  CHECK(d.fields[1].field == "journals");
  CHECK(format_change(d.fields[1].change) == "+9.6%");
  CHECK(format_change(d.fields[3].change) == "+10.4%");
  REQUIRE(d.scores.size() == 3);
  // exact difference of the two ratios, not of their rounded forms
  __int128 num = static_cast<__int128>(2'248'748) * 40'664'485 - static_cast<__int128>(2'052'172) * 44'766'800;
  __int128 den = static_cast<__int128>(40'664'485) * 44'766'800;
  CHECK(*d.scores[0].difference == Fraction(num, den));
  CHECK(d.scores[0].difference->percent(2) == "-0.02");

  auto same = compare_snapshots(a, a);
  for (const auto& f : same.fields) CHECK(format_change(f.change) == "0.0%");
  for (const auto& s : same.scores) CHECK(s.difference->num == 0);

  MetricsReport zero;
  zero.language = "en";
  auto from_zero = compare_snapshots(zero, b);
  CHECK_FALSE(from_zero.fields[0].change.has_value());
  CHECK(format_change(std::nullopt) == "n/a");
  CHECK_FALSE(from_zero.scores[0].difference.has_value());

  auto other_lang = b;
  other_lang.language = "de";
  CHECK_THROWS_AS(compare_snapshots(a, other_lang), std::invalid_argument);
}

TEST_CASE("json round trip and table rendering") {
  auto r = MetricsReport::from_counts("da", "2024-03", 437'239, 7'522, 23'303, 70'760);
  auto j = to_json(r);
  CHECK(j["sci_score"] == 1.72);
  CHECK(j["exact"]["sci_score"] == "7522/437239");
  CHECK(metrics_from_json(nlohmann::json::parse(j.dump())) == r);
  std::string table = render_table({r});
  CHECK(table.find("437,239") != std::string::npos);
  CHECK(table.find("1.72") != std::string::npos);
  CHECK(table.find("Sci score 2") != std::string::npos);
}
