#include "wikicite/dump_ingest.hpp"

#include <expat.h>

#include <boost/iostreams/filter/bzip2.hpp>
#include <boost/iostreams/filtering_stream.hpp>

#include <charconv>
#include <deque>
#include <exception>
#include <fstream>

#include "json.hpp"
#include "wikicite/text.hpp"

namespace wikicite::dump {

namespace io = boost::iostreams;

DumpParseError::DumpParseError(const std::string& what, std::uint64_t byte_offset, std::string element_path)
    : InputError(what + " at byte " + std::to_string(byte_offset) +
                 (element_path.empty() ? std::string() : " (" + element_path + ")")),
      byte_offset_(byte_offset),
      element_path_(std::move(element_path)) {}

Compression detect_compression(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open dump " + path.string());
  char magic[3] = {};
  in.read(magic, 3);
  if (in.gcount() == 3 && magic[0] == 'B' && magic[1] == 'Z' && magic[2] == 'h') return Compression::bz2;
  if (path.extension() == ".bz2") return Compression::bz2;
  return Compression::none;
}

namespace {

constexpr std::string_view kResyncPrefix = "<mediawiki>";

enum class Capture { none, title, ns, id, text };

enum class FailureKind { xml, page, history };

struct Failure {
  FailureKind kind;
  std::string message;
  std::uint64_t offset;
  std::string path;
};

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  s = text::trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

struct PageStream::Impl {
  DumpOptions options;
  std::unique_ptr<std::istream> source;
  std::unique_ptr<io::filtering_istream> filtered;
  std::istream* in = nullptr;

  XML_Parser parser = nullptr;
  std::int64_t parser_origin = 0;
  std::uint64_t global_pos = 0;
  bool finished = false;
  std::vector<char> chunk;

  std::deque<WikiPage> ready;
  DumpStats stats;
  std::vector<std::string> warnings;
  std::optional<Failure> failure;
  std::exception_ptr pending_error;

  std::vector<std::string> path;
  Capture capture = Capture::none;
  bool in_page = false;
  int revisions = 0;
  bool has_ns = false;
  bool has_id = false;
  std::string ns_text;
  std::string id_text;
  WikiPage current;

  ~Impl() {
    if (parser != nullptr) XML_ParserFree(parser);
  }

  void open_stream(std::unique_ptr<std::istream> s, Compression compression) {
    source = std::move(s);
    if (compression == Compression::bz2) {
      filtered = std::make_unique<io::filtering_istream>();
      filtered->push(io::bzip2_decompressor());
      filtered->push(*source);
      in = filtered.get();
    } else {
      in = source.get();
    }
    chunk.resize(options.chunk_size == 0 ? 1 << 16 : options.chunk_size);
    new_parser(0);
  }

  void new_parser(std::int64_t origin) {
    if (parser != nullptr) XML_ParserFree(parser);
    parser = XML_ParserCreate("UTF-8");
    if (parser == nullptr) throw Error("cannot create XML parser");
    XML_SetUserData(parser, this);
    XML_SetElementHandler(parser, &Impl::on_start, &Impl::on_end);
    XML_SetCharacterDataHandler(parser, &Impl::on_text);
    parser_origin = origin;
    path.clear();
    capture = Capture::none;
    in_page = false;
  }

  std::string element_path() const {
    std::string out;
    for (const auto& p : path) {
      if (!out.empty()) out.push_back('/');
      out += p;
    }
    return out;
  }

  std::uint64_t current_offset() const {
    auto idx = static_cast<std::int64_t>(XML_GetCurrentByteIndex(parser));
    return static_cast<std::uint64_t>(std::max<std::int64_t>(0, parser_origin + idx));
  }

  void fail(FailureKind kind, std::string message) {
    failure = Failure{kind, std::move(message), current_offset(), element_path()};
    XML_StopParser(parser, XML_FALSE);
  }

  const std::string& parent() const {
    static const std::string kEmpty;
    return path.size() >= 2 ? path[path.size() - 2] : kEmpty;
  }

  void start(std::string_view name) {
    path.emplace_back(name);
    if (path.size() == 1 && name != "mediawiki") {
      fail(FailureKind::xml, "root element is <" + std::string(name) + ">, expected <mediawiki>");
      return;
    }
    if (name == "page" && path.size() == 2) {
      in_page = true;
      revisions = 0;
      has_ns = has_id = false;
      ns_text.clear();
      id_text.clear();
      current = WikiPage{};
      return;
    }
    if (!in_page) return;
    const std::string& up = parent();
    if (up == "page") {
      if (name == "title") capture = Capture::title;
      else if (name == "ns") { capture = Capture::ns; has_ns = true; }
      else if (name == "id") { capture = Capture::id; has_id = true; }
      else if (name == "revision" && ++revisions > 1) {
        fail(FailureKind::history, "page has more than one revision; full-history dumps are not supported");
      }
    } else if (up == "revision" && name == "text") {
      capture = Capture::text;
    }
  }

  void end(std::string_view name) {
    capture = Capture::none;
    if (name == "page" && path.size() == 2 && in_page) {
      in_page = false;
      finish_page();
    }
    if (!path.empty()) path.pop_back();
  }

  void chars(std::string_view s) {
    switch (capture) {
      case Capture::title: current.title.append(s); break;
      case Capture::ns: ns_text.append(s); break;
      case Capture::id: id_text.append(s); break;
      case Capture::text: current.wikitext.append(s); break;
      case Capture::none: break;
    }
  }

  void finish_page() {
    std::string problem;
    if (text::trim(current.title).empty()) problem = "page without title";
    else if (!has_ns || !parse_int(ns_text, current.namespace_id)) problem = "page with missing or invalid <ns>";
    else if (!has_id || !parse_int(id_text, current.page_id)) problem = "page with missing or invalid <id>";
    if (!problem.empty()) {
      if (options.skip_bad_pages) {
        ++stats.pages_skipped;
        warnings.push_back(problem + " at byte " + std::to_string(current_offset()));
        return;
      }
      fail(FailureKind::page, problem);
      return;
    }
    ++stats.pages_seen;
    if (current.namespace_id == 0) ++stats.pages_in_article_namespace;
    ready.push_back(std::move(current));
    current = WikiPage{};
  }

  static void XMLCALL on_start(void* self, const XML_Char* name, const XML_Char**) {
    static_cast<Impl*>(self)->start(name);
  }
  static void XMLCALL on_end(void* self, const XML_Char* name) { static_cast<Impl*>(self)->end(name); }
  static void XMLCALL on_text(void* self, const XML_Char* s, int len) {
    static_cast<Impl*>(self)->chars(std::string_view(s, static_cast<size_t>(len)));
  }

  std::size_t read_chunk() {
    try {
      in->read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    } catch (const std::exception& e) {
      throw InputError(std::string("cannot decompress dump: ") + e.what());
    }
    if (in->bad()) throw InputError("read error while decompressing dump");
    auto got = static_cast<std::size_t>(in->gcount());
    stats.bytes_read += got;
    return got;
  }

  // Feeds bytes that start at global offset `start`.
  void feed(const char* data, std::size_t len, std::uint64_t start, bool final) {
    failure.reset();
    XML_Status status = XML_Parse(parser, data, static_cast<int>(len), final ? 1 : 0);
    if (status != XML_STATUS_ERROR && !failure) return;
    if (!failure) {
      failure = Failure{FailureKind::xml, XML_ErrorString(XML_GetErrorCode(parser)), current_offset(),
                        element_path()};
    }
    Failure f = *failure;
    failure.reset();
    if (f.kind == FailureKind::history || !options.skip_bad_pages) {
      throw DumpParseError(f.message, f.offset, f.path);
    }
    ++stats.pages_skipped;
    warnings.push_back(f.message + " at byte " + std::to_string(f.offset) + " (" + f.path + ")");
    std::size_t from = f.offset + 1 > start ? static_cast<std::size_t>(f.offset + 1 - start) : 0;
    from = std::min(from, len);
    resync(std::string(data + from, len - from), start + from);
  }

  // Skips forward to the next <page> element and restarts parsing there.
  void resync(std::string carry, std::uint64_t carry_start) {
    while (true) {
      std::size_t pos = find_page_open(carry);
      if (pos != std::string::npos) {
        new_parser(static_cast<std::int64_t>(carry_start + pos) - static_cast<std::int64_t>(kResyncPrefix.size()));
        XML_Parse(parser, kResyncPrefix.data(), static_cast<int>(kResyncPrefix.size()), 0);
        feed(carry.data() + pos, carry.size() - pos, carry_start + pos, false);
        return;
      }
      std::size_t keep = std::min<std::size_t>(carry.size(), 5);
      carry_start += carry.size() - keep;
      carry.erase(0, carry.size() - keep);
      std::size_t got = read_chunk();
      if (got == 0) {
        finished = true;
        return;
      }
      global_pos += got;
      carry.append(chunk.data(), got);
    }
  }

  static std::size_t find_page_open(const std::string& s) {
    std::size_t pos = 0;
    while ((pos = s.find("<page", pos)) != std::string::npos) {
      if (pos + 5 < s.size() && (s[pos + 5] == '>' || s[pos + 5] == ' ')) return pos;
      if (pos + 5 >= s.size()) return std::string::npos;
      pos += 5;
    }
    return std::string::npos;
  }

  void pump() {
    std::size_t got = read_chunk();
    std::uint64_t start = global_pos;
    global_pos += got;
    if (got == 0) {
      finished = true;
      feed(nullptr, 0, start, true);
      return;
    }
    feed(chunk.data(), got, start, false);
  }
};

PageStream::PageStream(const std::filesystem::path& path, DumpOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = options;
  Compression c = options.compression == Compression::automatic ? detect_compression(path) : options.compression;
  auto file = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*file) throw InputError("cannot open dump " + path.string());
  impl_->open_stream(std::move(file), c);
}

PageStream::PageStream(std::unique_ptr<std::istream> xml, DumpOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = options;
  Compression c = options.compression == Compression::automatic ? Compression::none : options.compression;
  impl_->open_stream(std::move(xml), c);
}

PageStream::~PageStream() = default;
PageStream::PageStream(PageStream&&) noexcept = default;
PageStream& PageStream::operator=(PageStream&&) noexcept = default;

std::optional<WikiPage> PageStream::next() {
  while (impl_->ready.empty()) {
    if (impl_->pending_error) {
      auto e = std::move(impl_->pending_error);
      impl_->finished = true;
      std::rethrow_exception(e);
    }
    if (impl_->finished) return std::nullopt;
    try {
      impl_->pump();
    } catch (...) {
      // pages completed before the error are still handed out first
      if (impl_->ready.empty()) {
        impl_->finished = true;
        throw;
      }
      impl_->pending_error = std::current_exception();
    }
  }
  WikiPage page = std::move(impl_->ready.front());
  impl_->ready.pop_front();
  return page;
}

const DumpStats& PageStream::stats() const { return impl_->stats; }
const std::vector<std::string>& PageStream::warnings() const { return impl_->warnings; }

PageStream open_dump(const std::filesystem::path& path, Compression compression, bool skip_bad_pages) {
  DumpOptions options;
  options.compression = compression;
  options.skip_bad_pages = skip_bad_pages;
  return PageStream(path, options);
}

RedirectMatcher::RedirectMatcher() : RedirectMatcher(std::vector<std::string>{"#REDIRECT"}) {}

RedirectMatcher::RedirectMatcher(std::vector<std::string> keywords) {
  for (auto& k : keywords) {
    std::string lowered = text::utf8_lower(text::trim(k));
    if (lowered.empty()) continue;
    if (std::find(keywords_.begin(), keywords_.end(), lowered) == keywords_.end()) {
      keywords_.push_back(std::move(lowered));
    }
  }
}

RedirectMatcher RedirectMatcher::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read redirect keyword list " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid redirect keyword list " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("redirect keyword list must be a JSON object");
  std::vector<std::string> keywords;
  for (const auto& [lang, list] : doc.items()) {
    if (!list.is_array()) throw ConfigError("redirect keywords for '" + lang + "' must be an array");
    for (const auto& k : list) keywords.push_back(k.get<std::string>());
  }
  return RedirectMatcher(std::move(keywords));
}

bool RedirectMatcher::is_redirect(std::string_view wikitext) const {
  // MediaWiki allows leading whitespace before the directive.
  std::string_view body = text::trim(wikitext);
  std::string head = text::utf8_lower(body.substr(0, std::min<std::size_t>(body.size(), 96)));
  for (const auto& k : keywords_) {
    if (head.compare(0, k.size(), k) != 0) continue;
    std::string_view rest = std::string_view(head).substr(k.size());
    while (!rest.empty() && (rest.front() == ' ' || rest.front() == ':' || rest.front() == '\t')) {
      rest.remove_prefix(1);
    }
    if (rest.substr(0, 2) == "[[") return true;
  }
  return false;
}

bool is_article(const WikiPage& page, const RedirectMatcher& redirects) {
  return page.namespace_id == 0 && !redirects.is_redirect(page.wikitext);
}

ArticleFilter::ArticleFilter(PageStream& upstream, RedirectMatcher redirects)
    : upstream_(&upstream), redirects_(std::move(redirects)) {}

std::optional<WikiPage> ArticleFilter::next() {
  while (auto page = upstream_->next()) {
    if (is_article(*page, redirects_)) return page;
    ++dropped_;
  }
  return std::nullopt;
}

}  // namespace wikicite::dump
