#include "httplib.h"

#include <atomic>
#include <thread>

#include "doctest.h"
#include "wikicite/lookup.hpp"

using namespace wikicite::lookup;

namespace {

/// Local HTTP server on an ephemeral port for the duration of a test.
class LocalServer {
 public:
  LocalServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

HttpOptions options_for(const LocalServer& s) {
  HttpOptions o;
  o.base_url = s.url();
  o.contact = "ops@example.org";
  o.timeout = std::chrono::milliseconds(5000);
  return o;
}

const char* kCrossrefBody = R"({"status":"ok","message":{"items":[
  {"title":["Plate Tectonics Revisited"],"DOI":"10.1000/ABC","ISBN":["978-0-306-40615-7"]}]}})";

}  // namespace

TEST_CASE("url encoding keeps only unreserved characters") {
  CHECK(url_encode("abc-_.~XYZ019") == "abc-_.~XYZ019");
  CHECK(url_encode("a b&c=d") == "a%20b%26c%3Dd");
  CHECK(url_encode("é") == "%C3%A9");
  CHECK(url_encode("") == "");
}

TEST_CASE("crossref response parsing") {
  auto r = CrossrefSearch::parse_response(nlohmann::json::parse(kCrossrefBody));
  REQUIRE(r.status == SearchResult::Status::found);
  CHECK(r.candidate->title == "Plate Tectonics Revisited");
  REQUIRE(r.candidate->ids.size() == 2);
  CHECK(r.candidate->ids[0].first == "DOI");
  CHECK(r.candidate->ids[1] == std::pair<std::string, std::string>{"ISBN", "9780306406157"});
  CHECK(CrossrefSearch::parse_response(nlohmann::json::parse(R"({"message":{"items":[]}})")).status ==
        SearchResult::Status::not_found);
  CHECK(CrossrefSearch::parse_response(nlohmann::json::parse(R"({"oops":1})")).status == SearchResult::Status::error);
}

TEST_CASE("books response parsing prefers ISBN-13") {
  auto body = nlohmann::json::parse(R"({"items":[{"volumeInfo":{"title":"War and Peace","industryIdentifiers":[
      {"type":"ISBN_10","identifier":"0306406152"},{"type":"ISBN_13","identifier":"9780306406157"}]}}]})");
  auto r = BooksSearch::parse_response(body);
  REQUIRE(r.status == SearchResult::Status::found);
  CHECK(r.candidate->title == "War and Peace");
  CHECK(r.candidate->ids == wikicite::output::IdPairs{{"ISBN", "9780306406157"}});
  CHECK(BooksSearch::parse_response(nlohmann::json::parse(R"({"totalItems":0})")).status ==
        SearchResult::Status::not_found);
}

TEST_CASE("crossref client sends a polite query and reads the answer") {
  LocalServer srv;
  std::string seen_query, seen_agent, seen_mailto;
  srv.server().Get("/works", [&](const httplib::Request& req, httplib::Response& res) {
    seen_query = req.get_param_value("query.bibliographic");
    seen_mailto = req.get_param_value("mailto");
    seen_agent = req.get_header_value("User-Agent");
    res.set_content(kCrossrefBody, "application/json");
  });
  CrossrefSearch client(options_for(srv));
  auto r = client.search({"000000000000", "Plate tectonics & more", {"Wilson"}, Target::crossref});
  REQUIRE(r.status == SearchResult::Status::found);
  CHECK(r.candidate->title == "Plate Tectonics Revisited");
  CHECK(seen_query == "Plate tectonics & more");
  CHECK(seen_mailto == "ops@example.org");
  CHECK(seen_agent.find("mailto:ops@example.org") != std::string::npos);
}

TEST_CASE("books client sends the title and key") {
  LocalServer srv;
  std::string seen_q, seen_key;
  srv.server().Get("/books/v1/volumes", [&](const httplib::Request& req, httplib::Response& res) {
    seen_q = req.get_param_value("q");
    seen_key = req.get_param_value("key");
    res.set_content(R"({"items":[{"volumeInfo":{"title":"Roma"}}]})", "application/json");
  });
  auto o = options_for(srv);
  o.api_key = "k123";
  BooksSearch client(o);
  auto r = client.search({"000000000000", "Roma", {"Livy"}, Target::books});
  CHECK(r.status == SearchResult::Status::found);
  CHECK(seen_q == "intitle:Roma inauthor:Livy");
  CHECK(seen_key == "k123");
}

TEST_CASE("HTTP status codes map to outcomes") {
  LocalServer srv;
  std::atomic<int> status{200};
  srv.server().Get("/works", [&](const httplib::Request&, httplib::Response& res) {
    res.status = status.load();
    res.set_content(status == 200 ? "not json" : "{}", "application/json");
  });
  CrossrefSearch client(options_for(srv));
  LookupRequest req{"000000000000", "T", {}, Target::crossref};

  status = 404;
  CHECK(client.search(req).status == SearchResult::Status::not_found);
  status = 429;
  auto r = client.search(req);
  CHECK(r.status == SearchResult::Status::error);
  CHECK(r.retryable);
  status = 503;
  CHECK(client.search(req).retryable);
  status = 400;
  r = client.search(req);
  CHECK(r.status == SearchResult::Status::error);
  CHECK_FALSE(r.retryable);
  status = 200;
  CHECK(client.search(req).status == SearchResult::Status::error);
}

TEST_CASE("retries recover from transient server errors") {
  LocalServer srv;
  std::atomic<int> calls{0};
  srv.server().Get("/works", [&](const httplib::Request&, httplib::Response& res) {
    if (calls++ < 2) {
      res.status = 500;
      return;
    }
    res.set_content(kCrossrefBody, "application/json");
  });
  CrossrefSearch client(options_for(srv));
  PolicyOptions p;
  p.requests_per_second = 0;
  p.base_delay = std::chrono::milliseconds(1);
  PoliteSearch polite(client, p);
  auto r = resolve({"000000000000", "Plate tectonics revisited", {}, Target::crossref}, polite, 0.1);
  CHECK(r.outcome == Outcome::accepted);
  CHECK(calls == 3);
}

TEST_CASE("unreachable endpoint is a retryable transport error") {
  HttpOptions o;
  o.base_url = "http://127.0.0.1:1";
  o.timeout = std::chrono::milliseconds(1000);
  CrossrefSearch client(o);
  auto r = client.search({"000000000000", "T", {}, Target::crossref});
  CHECK(r.status == SearchResult::Status::error);
  CHECK(r.retryable);
}
