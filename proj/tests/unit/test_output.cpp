#include <random>
#include <sstream>

#include "doctest.h"
#include "generators.hpp"
#include "test_support.hpp"
#include "wikicite/output.hpp"

using namespace wikicite;
using namespace wikicite::output;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> parse_one(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> fields;
  REQUIRE(read_csv_record(in, fields));
  return fields;
}

DatasetRow sample_row() {
  DatasetRow r;
  r.type_of_citation = "cite journal";
  r.page_title = "Berlin";
  r.title = "A \"quoted\", title";
  r.url = "https://example.org/a?b=1,2";
  r.tld = "org";
  r.authors = {"Smith, J.", "Müller"};
  r.id_list = {{"DOI", "10.1000/xyz"}};
  r.citation = "{{cite journal|title=A \"quoted\", title}}";
  r.actual_label = classify::Label::journal;
  return r;
}

std::vector<fs::path> parts_in(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path().filename());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("csv escaping follows RFC 4180") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("") == "");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("line\nbreak") == "\"line\nbreak\"");
  CHECK(csv_escape("cr\r") == "\"cr\r\"");
  CHECK(csv_record({"a", "b,c", ""}) == "a,\"b,c\",\r\n");
}

TEST_CASE("csv reader handles quoting, line endings and the last record") {
  CHECK(parse_one("a,\"b,c\",\r\n") == std::vector<std::string>{"a", "b,c", ""});
  CHECK(parse_one("\"x\"\"y\",\"multi\r\nline\"\n") == std::vector<std::string>{"x\"y", "multi\r\nline"});
  CHECK(parse_one("no,newline") == std::vector<std::string>{"no", "newline"});

  std::istringstream in("a,b\r\nc,d\n");
  std::vector<std::string> f;
  REQUIRE(read_csv_record(in, f));
  REQUIRE(read_csv_record(in, f));
  CHECK(f == std::vector<std::string>{"c", "d"});
  CHECK_FALSE(read_csv_record(in, f));

  std::istringstream bad("\"open,field");
  CHECK_THROWS_AS(read_csv_record(bad, f), InputError);
}

TEST_CASE("fuzzed csv records round trip") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::string> fields;
    int n = std::uniform_int_distribution<int>(2, 6)(rng);
    for (int k = 0; k < n; ++k) fields.push_back(testing::random_text(rng, 5));
    CHECK(parse_one(csv_record(fields)) == fields);
  }
}

TEST_CASE("csv header lists the ten columns in order") {
  testing::TempDir dir;
  auto parts = write_rows({sample_row()}, dir.path(), {});
  REQUIRE(parts.size() == 1);
  std::string text = testing::slurp(parts[0]);
  CHECK(text.starts_with(
      "type_of_citation,page_title,title,url,tld,authors,id_list,citation,actual_label,acquired_id_list\r\n"));
}

TEST_CASE("jsonl rows use null for absent values and arrays for lists") {
  DatasetRow r;
  r.type_of_citation = "cite web";
  r.page_title = "P";
  r.citation = "{{cite web}}";
  std::string line = row_to_jsonl(r, false);
  CHECK(line ==
        "{\"type_of_citation\":\"cite web\",\"page_title\":\"P\",\"title\":null,\"url\":null,\"tld\":null,"
        "\"authors\":[],\"id_list\":[],\"citation\":\"{{cite web}}\",\"actual_label\":null,\"acquired_id_list\":[]}");
  r.extra = {{"b", "2"}, {"a", "1"}, {"b", "3"}};
  CHECK(row_to_jsonl(r, true).ends_with(",\"extra\":{\"b\":\"2\",\"a\":\"1\"}}"));
}

TEST_CASE("fuzzed rows round trip through csv and jsonl") {
  std::mt19937_64 rng(11);
  std::vector<DatasetRow> plain, extended;
  for (int i = 0; i < 500; ++i) plain.push_back(testing::random_row(rng, false));
  for (int i = 0; i < 500; ++i) extended.push_back(testing::random_row(rng, true));

  testing::TempDir dir;
  write_rows(plain, dir / "csv", {Format::csv, 0, false});
  write_rows(plain, dir / "jsonl", {Format::jsonl, 0, false});
  write_rows(extended, dir / "ext", {Format::jsonl, 0, true});
  CHECK(read_rows(dir / "csv") == plain);
  CHECK(read_rows(dir / "jsonl") == plain);
  CHECK(read_rows(dir / "ext") == extended);
}

TEST_CASE("empty optional cells read back as absent") {
  testing::TempDir dir;
  DatasetRow r = sample_row();
  r.title = std::nullopt;
  r.actual_label = std::nullopt;
  write_rows({r}, dir.path(), {});
  auto back = read_rows(dir.path());
  REQUIRE(back.size() == 1);
  CHECK_FALSE(back[0].title.has_value());
  CHECK_FALSE(back[0].actual_label.has_value());
}

TEST_CASE("part files split at the row limit") {
  testing::TempDir dir;
  std::mt19937_64 rng(5);
  std::vector<DatasetRow> rows;
  for (int i = 0; i < 25; ++i) rows.push_back(testing::random_row(rng, false));
  auto parts = write_rows(rows, dir.path(), {Format::jsonl, 10, false});
  REQUIRE(parts.size() == 3);
  CHECK(parts_in(dir.path()) ==
        std::vector<fs::path>{"part-00000.jsonl", "part-00001.jsonl", "part-00002.jsonl"});
  CHECK(read_rows(dir.path()) == rows);
  CHECK(read_rows(parts[2]).size() == 5);
}

TEST_CASE("a rerun with fewer rows removes stale parts") {
  testing::TempDir dir;
  std::vector<DatasetRow> rows(30, sample_row());
  write_rows(rows, dir.path(), {Format::csv, 10, false});
  CHECK(parts_in(dir.path()).size() == 3);
  write_rows({sample_row()}, dir.path(), {Format::csv, 10, false});
  CHECK(parts_in(dir.path()) == std::vector<fs::path>{"part-00000.csv"});
}

TEST_CASE("an empty dataset still writes a csv header") {
  testing::TempDir dir;
  auto parts = write_rows({}, dir.path(), {});
  REQUIRE(parts.size() == 1);
  CHECK(read_rows(dir.path()).empty());
}

TEST_CASE("an unfinished writer leaves nothing behind") {
  testing::TempDir dir;
  {
    DatasetWriter w(dir.path(), {Format::csv, 2, false});
    for (int i = 0; i < 5; ++i) w.write(sample_row());
  }
  CHECK(parts_in(dir.path()).empty());
}

TEST_CASE("reader accepts a byte order mark and rejects missing columns") {
  testing::TempDir dir;
  auto parts = write_rows({sample_row()}, dir / "ok", {});
  testing::write_text(dir / "bom.csv", "\xEF\xBB\xBF" + testing::slurp(parts[0]));
  CHECK(read_rows(dir / "bom.csv") == std::vector<DatasetRow>{sample_row()});

  testing::write_text(dir / "short.csv", "type_of_citation,page_title\r\ncite web,P\r\n");
  try {
    read_rows(dir / "short.csv");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.column() == "title");
  }

  testing::write_text(dir / "short.jsonl", "{\"type_of_citation\":\"cite web\"}\n");
  CHECK_THROWS_AS(read_rows(dir / "short.jsonl"), SchemaError);

  testing::write_text(dir / "badlabel.jsonl",
                      row_to_jsonl(sample_row(), false).replace(row_to_jsonl(sample_row(), false).find("\"journal\""),
                                                                9, "\"zine\"") + "\n");
  try {
    read_rows(dir / "badlabel.jsonl");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.column() == "actual_label");
  }
}

TEST_CASE("unknown csv columns land in extra") {
  testing::TempDir dir;
  auto fields = row_to_csv_fields(sample_row());
  fields.push_back("v");
  std::vector<std::string> header(kColumns.begin(), kColumns.end());
  header.push_back("volume");
  testing::write_text(dir / "x.csv", csv_record(header) + csv_record(fields));
  auto rows = read_rows(dir / "x.csv");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].extra == std::vector<std::pair<std::string, std::string>>{{"volume", "v"}});
}

TEST_CASE("format detection") {
  CHECK(parse_format("csv") == Format::csv);
  CHECK(parse_format("jsonl") == Format::jsonl);
  CHECK_THROWS_AS(parse_format("xml"), ConfigError);
  testing::TempDir dir;
  CHECK_THROWS_AS(detect_format(dir.path()), InputError);
  CHECK_THROWS_AS(read_rows(dir / "missing.csv"), InputError);
}
