#include "doctest.h"
#include "test_support.hpp"
#include "wikicite/domain.hpp"
#include "wikicite/errors.hpp"

using namespace wikicite;
using namespace wikicite::domain;

TEST_CASE("registrable domains from the shipped list") {
  const auto& p = testing::psl();
  CHECK(p.registrable_domain("news.bbc.co.uk") == "bbc.co.uk");
  CHECK(p.registrable_domain("www.bbc.com") == "bbc.com");
  CHECK(p.registrable_domain("bbc.co.uk") == "bbc.co.uk");
  CHECK_FALSE(p.registrable_domain("co.uk").has_value());
  CHECK_FALSE(p.registrable_domain("uk").has_value());
  CHECK(p.registrable_domain("WWW.Example.COM.") == "example.com");
  CHECK(p.registrable_domain("a.b.example.unknowntld") == "example.unknowntld");
  CHECK_FALSE(p.registrable_domain("192.168.0.1").has_value());
  CHECK_FALSE(p.registrable_domain("").has_value());
}

TEST_CASE("wildcard and exception rules") {
  const auto& p = testing::psl();
  CHECK_FALSE(p.registrable_domain("foo.ck").has_value());
  CHECK(p.registrable_domain("bar.foo.ck") == "bar.foo.ck");
  CHECK(p.registrable_domain("www.ck") == "www.ck");
  CHECK(p.registrable_domain("a.b.kawasaki.jp") == "a.b.kawasaki.jp");
  CHECK(p.registrable_domain("x.city.kawasaki.jp") == "city.kawasaki.jp");
  CHECK(p.public_suffix("x.city.kawasaki.jp") == "kawasaki.jp");
}

TEST_CASE("private section is excluded unless requested") {
  CHECK(testing::psl().registrable_domain("someone.blogspot.com") == "blogspot.com");
  auto with_private = PublicSuffixList::load(testing::data_dir() / "public_suffix_list.dat", true);
  CHECK(with_private.registrable_domain("someone.blogspot.com") == "someone.blogspot.com");
}

TEST_CASE("inline list parsing") {
  auto p = PublicSuffixList::parse("// comment\ncom\n*.test\n!ok.test\n\n// ===BEGIN PRIVATE DOMAINS===\npriv.com\n");
  CHECK(p.registrable_domain("a.b.com") == "b.com");
  CHECK(p.registrable_domain("a.x.test") == "a.x.test");
  CHECK(p.registrable_domain("ok.test") == "ok.test");
  CHECK(p.registrable_domain("a.priv.com") == "priv.com");
}

TEST_CASE("missing suffix list is a config error") {
  CHECK_THROWS_AS(PublicSuffixList::load("/nonexistent/psl.dat"), ConfigError);
}

TEST_CASE("url parsing") {
  auto u = parse_url("https://user:pw@News.BBC.co.uk:8080/path/a?q=1#frag");
  REQUIRE(u.has_value());
  CHECK(u->host == "news.bbc.co.uk");
  CHECK(u->path == "/path/a");
  u = parse_url("//example.org/x");
  REQUIRE(u.has_value());
  CHECK(u->host == "example.org");
  CHECK_FALSE(parse_url("not a url").has_value());
  CHECK_FALSE(parse_url("").has_value());
  CHECK_FALSE(parse_url("mailto:a@b.c").has_value());
}

TEST_CASE("tld is the label left of the public suffix") {
  const auto& p = testing::psl();
  CHECK(extract_tld("https://www.bbc.co.uk/", p) == "bbc");
  CHECK(extract_tld("http://nytimes.com/2020/01/01/x.html", p) == "nytimes");
  CHECK(extract_tld("https://www.spiegel.de/panorama", p) == "spiegel");
  CHECK(extract_tld("https://folha.uol.com.br/", p) == "uol");
  CHECK_FALSE(extract_tld("https://co.uk/", p).has_value());
  CHECK_FALSE(extract_tld("no url", p).has_value());
  CHECK(registrable_domain_of_url("https://edition.cnn.com/x", p) == "cnn.com");
}
