#include <random>

#include "doctest.h"
#include "test_support.hpp"
#include "wikicite/classify.hpp"
#include "wikicite/errors.hpp"

using namespace wikicite;
using namespace wikicite::classify;

namespace {

NewsDomainSet news_of(std::initializer_list<const char*> entries) {
  NewsDomainSet s(testing::shared_psl());
  for (const char* e : entries) s.add(e, "test");
  return s;
}

std::vector<Identifier> ids(std::initializer_list<std::pair<IdScheme, const char*>> list) {
  std::vector<Identifier> out;
  for (const auto& [s, v] : list) out.push_back({s, v, true});
  return out;
}

}  // namespace

TEST_CASE("label names") {
  for (Label l : {Label::journal, Label::book, Label::news, Label::other}) CHECK(parse_label(label_name(l)) == l);
  CHECK_FALSE(parse_label("magazine").has_value());
  CHECK(rule_name(Rule::doi_journal_template) == "doi_journal_template");
}

TEST_CASE("news entry normalization") {
  auto s = news_of({});
  CHECK(s.normalize("https://www.bbc.co.uk/news") == "bbc.co.uk");
  CHECK(s.normalize("WWW.NYTimes.com") == "nytimes.com");
  CHECK(s.normalize("edition.cnn.com") == "cnn.com");
  CHECK(s.normalize("https://www.facebook.com/BBCNews/posts/1") == "facebook.com/bbcnews");
  CHECK(s.normalize("facebook.com") == "facebook.com");
  CHECK_FALSE(s.normalize("co.uk").has_value());
  CHECK_FALSE(s.normalize("   ").has_value());
}

TEST_CASE("union of lists with provenance") {
  testing::TempDir dir;
  testing::write_text(dir / "a.txt", "source=alpha\n# comment\nbbc.co.uk\nnytimes.com\n\nreuters.com\n");
  testing::write_text(dir / "b.txt", "https://www.reuters.com/\napnews.com\n");
  auto s = NewsDomainSet::load({dir / "a.txt", dir / "b.txt"}, testing::shared_psl());
  CHECK(s.size() == 3 + 2 - 1);
  CHECK(s.sources_of("reuters.com") == std::set<std::string>{"alpha", "b"});
  CHECK(s.sources_of("apnews.com") == std::set<std::string>{"b"});
  CHECK(s.source_names() == std::vector<std::string>{"alpha", "b"});
}

TEST_CASE("excluded categories are skipped") {
  testing::TempDir dir;
  testing::write_text(dir / "m.txt", "source=mbfc\nreuters.com least-biased\ntheonion.com\tsatire\n"
                                     "infowars.com conspiracy-pseudo\nrt.com questionable\nnature.com Science\n");
  auto s = NewsDomainSet::load({dir / "m.txt"}, testing::shared_psl());
  CHECK(s.entries() == std::vector<std::string>{"reuters.com"});
}

TEST_CASE("loading errors and warnings") {
  CHECK_THROWS_AS(NewsDomainSet::load({"/nonexistent/list.txt"}, testing::shared_psl()), ConfigError);
  testing::TempDir dir;
  testing::write_text(dir / "empty.txt", "# nothing\n");
  std::vector<std::string> warnings;
  auto s = NewsDomainSet::load({dir / "empty.txt"}, testing::shared_psl(), &warnings);
  CHECK(s.empty());
  CHECK_FALSE(warnings.empty());
}

TEST_CASE("shipped lists load and leave excluded categories out") {
  std::vector<std::filesystem::path> lists;
  for (const auto& e : std::filesystem::directory_iterator(testing::data_dir() / "news")) lists.push_back(e.path());
  std::vector<std::string> warnings;
  auto s = NewsDomainSet::load(lists, testing::shared_psl(), &warnings);
  CHECK(warnings.empty());
  CHECK(s.size() > 50);
  CHECK(s.contains("bbc.co.uk"));
  CHECK(s.contains("facebook.com/bbcnews"));
  CHECK_FALSE(s.contains("theonion.com"));
  CHECK_FALSE(s.contains("infowars.com"));
  CHECK_FALSE(s.contains("nature.com"));
  CHECK_FALSE(s.contains("facebook.com"));
}

TEST_CASE("url matching, social hosts need the page path") {
  auto s = news_of({"bbc.co.uk", "facebook.com/bbcnews"});
  CHECK(s.matches_url("https://www.bbc.co.uk/x"));
  CHECK(s.matches_url("http://news.bbc.co.uk/1/hi/world.stm"));
  CHECK(s.matches_url("https://www.facebook.com/bbcnews/videos/1"));
  CHECK_FALSE(s.matches_url("https://www.facebook.com/someoneelse"));
  CHECK_FALSE(s.matches_url("https://www.facebook.com/"));
  CHECK_FALSE(s.matches_url("https://bbc.com/"));
  CHECK_FALSE(s.matches_url("not a url"));
}

TEST_CASE("classification examples") {
  auto news = news_of({"bbc.co.uk"});
  std::optional<std::string> none;
  CHECK(classify::classify("cite journal", ids({{IdScheme::PMID, "123"}}), none, news) ==
        ClassLabel{Label::journal, Rule::pmc_pmid});
  CHECK(classify::classify("cite web", ids({{IdScheme::DOI, "10.1/x"}}), none, news) == ClassLabel{Label::other, Rule::none});
  CHECK(classify::classify("cite web", ids({{IdScheme::DOI, "10.1/x"}}), std::string("https://www.bbc.co.uk/x"), news) ==
        ClassLabel{Label::news, Rule::news_tld});
  CHECK(classify::classify("cite book", ids({{IdScheme::ISBN, "9783161484100"}}), none, news) ==
        ClassLabel{Label::book, Rule::isbn});
  CHECK(classify::classify("cite web", {}, std::string("https://www.bbc.co.uk/x"), news) ==
        ClassLabel{Label::news, Rule::news_tld});
  CHECK(classify::classify("cite book", ids({{IdScheme::PMID, "1"}, {IdScheme::ISBN, "9780000000002"}}), none, news) ==
        ClassLabel{Label::journal, Rule::pmc_pmid});
  CHECK(classify::classify("", {}, none, news) == ClassLabel{Label::other, Rule::none});
  CHECK(classify::classify("cite conference", ids({{IdScheme::DOI, "10.1/x"}}), none, news) ==
        ClassLabel{Label::journal, Rule::doi_journal_template});
  CHECK(classify::classify("cite proceedings", ids({{IdScheme::DOI, "10.1/x"}}), none, news).label == Label::journal);
  CHECK(classify::classify("cite encyclopedia", ids({{IdScheme::DOI, "10.1/x"}}), none, news).label == Label::other);
  CHECK(classify::classify("cite journal", ids({{IdScheme::PMC, "77"}}), none, news).rule_fired == Rule::pmc_pmid);
}

TEST_CASE("label and rule agree") {
  auto news = news_of({"bbc.co.uk"});
  std::mt19937_64 rng(5);
  const char* types[] = {"cite web", "cite journal", "cite book", "cite conference", "citation"};
  for (int i = 0; i < 2000; ++i) {
    std::vector<Identifier> list;
    if (rng() % 2) list.push_back({IdScheme::PMID, "1", true});
    if (rng() % 2) list.push_back({IdScheme::DOI, "10.1/a", true});
    if (rng() % 2) list.push_back({IdScheme::ISBN, "0306406152", true});
    std::optional<std::string> url;
    if (rng() % 2) url = rng() % 2 ? "https://bbc.co.uk/a" : "https://example.com/a";
    ClassLabel l = classify::classify(types[rng() % 5], list, url, news);
    switch (l.label) {
      case Label::journal: CHECK((l.rule_fired == Rule::pmc_pmid || l.rule_fired == Rule::doi_journal_template)); break;
      case Label::book: CHECK(l.rule_fired == Rule::isbn); break;
      case Label::news: CHECK(l.rule_fired == Rule::news_tld); break;
      case Label::other: CHECK(l.rule_fired == Rule::none); break;
    }
  }
}

TEST_CASE("news monotonicity: a larger set never demotes") {
  auto small = news_of({"bbc.co.uk"});
  auto large = news_of({"bbc.co.uk", "example.com", "cnn.com"});
  std::mt19937_64 rng(9);
  const char* urls[] = {"https://bbc.co.uk/a", "https://example.com/a", "https://cnn.com/x", "https://other.org/"};
  for (int i = 0; i < 1000; ++i) {
    std::vector<Identifier> list;
    if (rng() % 3 == 0) list.push_back({IdScheme::ISBN, "0306406152", true});
    if (rng() % 3 == 0) list.push_back({IdScheme::DOI, "10.1/a", true});
    std::optional<std::string> url = urls[rng() % 4];
    auto a = classify::classify("cite journal", list, url, small);
    auto b = classify::classify("cite journal", list, url, large);
    if (a.label == Label::journal || a.label == Label::book || a.label == Label::news) CHECK(a == b);
  }
}
