#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "wikicite/errors.hpp"
#include "wikicite/identifiers.hpp"
#include "wikicite/lookup.hpp"

namespace wikicite::lookup {

std::string url_encode(std::string_view s) {
  static const char* kHex = "0123456789ABCDEF";
  std::string out;
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
        c == '.' || c == '~') {
      out.push_back(ch);
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 15]);
    }
  }
  return out;
}

namespace {

std::string user_agent(const HttpOptions& o) {
  std::string ua = "wikicite/1.0";
  if (!o.contact.empty()) ua += " (mailto:" + o.contact + ")";
  return ua;
}

SearchResult get_json(const HttpOptions& o, const std::string& path, nlohmann::json& body) {
  httplib::Client client(o.base_url);
  if (!client.is_valid()) return SearchResult::failure("invalid endpoint URL " + o.base_url, false);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(o.timeout).count();
  client.set_connection_timeout(static_cast<time_t>(secs), 0);
  client.set_read_timeout(static_cast<time_t>(secs), 0);
  client.set_follow_location(true);
  httplib::Headers headers{{"User-Agent", user_agent(o)}, {"Accept", "application/json"}};
  auto res = client.Get(path, headers);
  if (!res) return SearchResult::failure("request failed: " + httplib::to_string(res.error()), true);
  if (res->status == 404) return SearchResult::none();
  if (res->status == 429 || res->status >= 500) {
    return SearchResult::failure("HTTP " + std::to_string(res->status), true);
  }
  if (res->status != 200) return SearchResult::failure("HTTP " + std::to_string(res->status), false);
  try {
    body = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception&) {
    return SearchResult::failure("response is not JSON", true);
  }
  return SearchResult::found({});
}

}  // namespace

CrossrefSearch::CrossrefSearch(HttpOptions options) : options_(std::move(options)) {
  if (options_.base_url.empty()) options_.base_url = "https://api.crossref.org";
}

SearchResult CrossrefSearch::parse_response(const nlohmann::json& body) {
  if (!body.is_object() || !body.contains("message") || !body["message"].contains("items")) {
    return SearchResult::failure("unexpected crossref response shape", false);
  }
  const auto& items = body["message"]["items"];
  if (!items.is_array() || items.empty()) return SearchResult::none();
  const auto& item = items[0];
  Candidate c;
  if (item.contains("title") && item["title"].is_array() && !item["title"].empty() && item["title"][0].is_string()) {
    c.title = item["title"][0].get<std::string>();
  }
  if (item.contains("DOI") && item["DOI"].is_string()) {
    c.ids.emplace_back("DOI", normalize_identifier(IdScheme::DOI, item["DOI"].get<std::string>()).value);
  }
  if (item.contains("ISBN") && item["ISBN"].is_array() && !item["ISBN"].empty() && item["ISBN"][0].is_string()) {
    c.ids.emplace_back("ISBN", normalize_identifier(IdScheme::ISBN, item["ISBN"][0].get<std::string>()).value);
  }
  if (c.title.empty()) return SearchResult::none();
  return SearchResult::found(std::move(c));
}

SearchResult CrossrefSearch::search(const LookupRequest& request) {
  std::string path = "/works?rows=1&query.bibliographic=" + url_encode(request.title);
  if (!request.authors.empty()) path += "&query.author=" + url_encode(request.authors.front());
  if (!options_.contact.empty()) path += "&mailto=" + url_encode(options_.contact);
  nlohmann::json body;
  SearchResult r = get_json(options_, path, body);
  if (r.status != SearchResult::Status::found) return r;
  return parse_response(body);
}

BooksSearch::BooksSearch(HttpOptions options) : options_(std::move(options)) {
  if (options_.base_url.empty()) options_.base_url = "https://www.googleapis.com";
}

SearchResult BooksSearch::parse_response(const nlohmann::json& body) {
  if (!body.is_object()) return SearchResult::failure("unexpected books response shape", false);
  if (!body.contains("items") || !body["items"].is_array() || body["items"].empty()) return SearchResult::none();
  const auto& info = body["items"][0].value("volumeInfo", nlohmann::json::object());
  Candidate c;
  c.title = info.value("title", "");
  std::string isbn13;
  std::string isbn10;
  if (info.contains("industryIdentifiers") && info["industryIdentifiers"].is_array()) {
    for (const auto& id : info["industryIdentifiers"]) {
      std::string type = id.value("type", "");
      std::string value = id.value("identifier", "");
      if (type == "ISBN_13" && isbn13.empty()) isbn13 = value;
      if (type == "ISBN_10" && isbn10.empty()) isbn10 = value;
    }
  }
  std::string isbn = isbn13.empty() ? isbn10 : isbn13;
  if (!isbn.empty()) c.ids.emplace_back("ISBN", normalize_identifier(IdScheme::ISBN, isbn).value);
  if (c.title.empty()) return SearchResult::none();
  return SearchResult::found(std::move(c));
}

SearchResult BooksSearch::search(const LookupRequest& request) {
  std::string q = "intitle:" + request.title;
  if (!request.authors.empty()) q += " inauthor:" + request.authors.front();
  std::string path = "/books/v1/volumes?maxResults=1&q=" + url_encode(q);
  if (!options_.api_key.empty()) path += "&key=" + url_encode(options_.api_key);
  nlohmann::json body;
  SearchResult r = get_json(options_, path, body);
  if (r.status != SearchResult::Status::found) return r;
  return parse_response(body);
}

}  // namespace wikicite::lookup
