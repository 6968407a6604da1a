#include "doctest.h"
#include "test_support.hpp"
#include "wikicite/errors.hpp"
#include "wikicite/harmonize.hpp"
#include "wikicite/wikicode.hpp"

using namespace wikicite;
using namespace wikicite::harmonize;

namespace {

TranslationTable table(const std::string& lang) {
  return load_translation_table(lang, testing::data_dir() / "tables" / (lang + ".json"));
}

struct Translated {
  Citation citation;
  TranslateReport report;
};

Translated run(const std::string& wikitext, const TranslationTable& t, const std::string& title = "Page") {
  dump::WikiPage page{title, 0, 1, wikitext};
  auto templates = wikicode::extract_templates(wikitext);
  REQUIRE(templates.size() == 1);
  REQUIRE(is_citation_template(templates[0], t));
  Translated out;
  out.citation = translate(templates[0], page, t, testing::psl(), &out.report);
  return out;
}

std::optional<std::string> param(const Citation& c, const std::string& key) {
  for (const auto& [k, v] : c.params) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::optional<std::string> extra(const Citation& c, const std::string& key) {
  for (const auto& [k, v] : c.extra) {
    if (k == key) return v;
  }
  return std::nullopt;
}

wikicode::RawTemplate named(const std::string& name) { return wikicode::extract_templates("{{" + name + "}}").at(0); }

}  // namespace

TEST_CASE("every shipped table loads") {
  for (const auto& lang : supported_languages()) {
    CAPTURE(lang);
    CHECK_NOTHROW(table(lang));
  }
  CHECK(supported_languages().size() == 15);
}

TEST_CASE("load examples") {
  CHECK(table("es").template_map.at("cita libro").english == "cite book");
  CHECK(table("de").template_map.at("internetquelle").english == "cite web");
  auto en = table("en");
  CHECK(en.passthrough_english);
  CHECK(en.template_map.empty());
  CHECK(en.default_keys.empty());
}

TEST_CASE("table validation reports every problem at once") {
  std::string json = R"({
    "language": "de",
    "default_keys": {"titel": "title", "foo": "not-a-key"},
    "templates": [
      {"local": "Literatur", "english": "cite book", "keys": {"x": "bogus"}},
      {"local": "literatur", "english": "cite book"},
      {"local": "quelle", "english": "cite nothing"},
      {"local": "cite web", "english": "cite web"}
    ]
  })";
  try {
    parse_translation_table("de", json);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("not-a-key") != std::string::npos);
    CHECK(msg.find("bogus") != std::string::npos);
    CHECK(msg.find("duplicate local template 'literatur'") != std::string::npos);
    CHECK(msg.find("cite nothing") != std::string::npos);
    CHECK(msg.find("shadows") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_translation_table("de", R"({"language": "fr"})"), ConfigError);
  CHECK_THROWS_AS(parse_translation_table("xx", R"({"language": "xx"})"), ConfigError);
  CHECK_THROWS_AS(parse_translation_table("de", "{not json"), ConfigError);
  CHECK_THROWS_AS(load_translation_table("de", "/nonexistent/de.json"), ConfigError);
}

TEST_CASE("is_citation_template examples") {
  CHECK(is_citation_template(named("Wayback"), table("ru")));
  CHECK_FALSE(is_citation_template(named("Infobox person"), table("ru")));
  CHECK(is_citation_template(named("Cite web"), table("da")));
  CHECK_FALSE(is_citation_template(named("#if:x"), table("en")));
  TranslationTable no_passthrough = table("da");
  no_passthrough.passthrough_english = false;
  CHECK_FALSE(is_citation_template(named("cite web"), no_passthrough));
}

TEST_CASE("German web source") {
  auto r = run("{{internetquelle|titel=X|url=https://example.org/a}}", table("de"));
  CHECK(r.citation.type_of_citation == "cite web");
  CHECK(r.citation.title == "X");
  CHECK(r.citation.url == "https://example.org/a");
  CHECK(r.citation.tld == "example");
  CHECK(r.citation.source_language == "de");
  CHECK(r.citation.source_template == "internetquelle");
}

TEST_CASE("English journal passes through") {
  auto r = run("{{cite journal|title=T|doi=10.1000/182}}", table("en"));
  CHECK(r.citation.type_of_citation == "cite journal");
  REQUIRE(r.citation.id_list.size() == 1);
  CHECK(r.citation.id_list[0].scheme == IdScheme::DOI);
  CHECK(r.citation.id_list[0].value == "10.1000/182");
}

TEST_CASE("values are never rewritten") {
  std::string src = "{{cita libro|título=Don {{lang|es|Quijote}}|editorial= Juan  de la Cuesta |idioma=[[español|es]]}}";
  auto r = run(src, table("es"), "Cervantes");
  CHECK(r.citation.citation_text == src);
  CHECK(r.citation.page_title == "Cervantes");
  CHECK(r.citation.title == "Don {{lang|es|Quijote}}");
  CHECK(extra(r.citation, "publisher") == "Juan  de la Cuesta");
  CHECK(extra(r.citation, "language") == "[[español|es]]");
}

TEST_CASE("key resolution order") {
  TranslationTable t = parse_translation_table("es", R"({
    "language": "es",
    "default_keys": {"título": "title", "autor": "author", "apellido": "last", "nombre": "first"},
    "templates": [{"local": "cita x", "english": "cite book", "keys": {"título": "chapter"}}]
  })");
  auto r = run("{{cita x|título=A|apellido2=B|nombre2=C|isbn=0-306-40615-2|raro=D}}", t);
  // template-specific key wins over the default
  CHECK(param(r.citation, "chapter") == "A");
  CHECK_FALSE(r.citation.title.has_value());
  // numeric suffix resolved through the base key
  CHECK(param(r.citation, "last2") == "B");
  CHECK(param(r.citation, "first2") == "C");
  CHECK(r.citation.authors == std::vector<std::string>{"B, C"});
  // key that is already English stays
  REQUIRE(r.citation.id_list.size() == 1);
  CHECK(r.citation.id_list[0].value == "0306406152");
  // anything else keeps a language prefix and is reported
  CHECK(param(r.citation, "es:raro") == "D");
  CHECK(r.report.unmapped_keys == std::vector<std::string>{"cita x|raro"});
}

TEST_CASE("positional parameters use their position") {
  auto r = run("{{Link|pt|https://www.publico.pt/x|Lisboa hoje}}", table("pt"));
  CHECK(r.citation.type_of_citation == "cite web");
  CHECK(r.citation.url == "https://www.publico.pt/x");
  CHECK(r.citation.title == "Lisboa hoje");
  CHECK(extra(r.citation, "language") == "pt");
  CHECK(r.citation.tld == "publico");
}

TEST_CASE("identifiers: first occurrence wins, invalid ones kept and reported") {
  auto r = run("{{cite book|title=T|isbn=978-3-16-148410-1|ISBN=0-306-40615-2|doi=10.1/a|pmid=1|pmid=2}}", table("en"));
  // keys are lowercased on parse, so ISBN= is a duplicate of isbn=
  std::vector<Identifier> expected{{IdScheme::ISBN, "9783161484101", false}, {IdScheme::DOI, "10.1/a", true},
                                   {IdScheme::PMID, "1", true}};
  CHECK(r.citation.id_list == expected);
  CHECK_FALSE(r.citation.id_list[0].valid);
  CHECK(r.report.invalid_ids.size() == 1);
  CHECK(r.report.duplicate_ids.size() == 2);
}

TEST_CASE("author assembly") {
  using P = std::vector<std::pair<std::string, std::string>>;
  CHECK(assemble_authors(P{{"last2", "Doe"}, {"first2", "Jane"}, {"last1", "Roe"}, {"first1", "Rick"}}) ==
        std::vector<std::string>{"Roe, Rick", "Doe, Jane"});
  CHECK(assemble_authors(P{{"last", "Solo"}}) == std::vector<std::string>{"Solo"});
  CHECK(assemble_authors(P{{"author", "Ann"}, {"author2", "Bob"}}) == std::vector<std::string>{"Ann", "Bob"});
  CHECK(assemble_authors(P{{"vauthors", "Smith J, Jones K ,"}}) == std::vector<std::string>{"Smith J", "Jones K"});
  CHECK(assemble_authors(P{{"surname", "Li"}, {"given", "Wei"}}) == std::vector<std::string>{"Li, Wei"});
  CHECK(assemble_authors(P{{"last", " "}, {"title", "x"}}).empty());
}

TEST_CASE("tld present iff url is present and parseable") {
  auto r = run("{{cite web|url=not a url|title=T}}", table("en"));
  CHECK(r.citation.url == "not a url");
  CHECK_FALSE(r.citation.tld.has_value());
  r = run("{{cite web|title=T}}", table("en"));
  CHECK_FALSE(r.citation.url.has_value());
  CHECK_FALSE(r.citation.tld.has_value());
  r = run("{{cite web|url=https://www.bbc.co.uk/|title=T}}", table("en"));
  CHECK(r.citation.tld == "bbc");
}

TEST_CASE("non-citation template is refused") {
  dump::WikiPage page{"P", 0, 1, "{{infobox}}"};
  CHECK_THROWS_AS(translate(named("infobox"), page, table("de"), testing::psl()), std::invalid_argument);
}
