#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wikicite/errors.hpp"

namespace wikicite::dump {

/// One article from a pages-articles dump. Immutable once produced.
struct WikiPage {
  std::string title;
  int namespace_id = 0;
  std::int64_t page_id = 0;
  std::string wikitext;

  bool operator==(const WikiPage&) const = default;
};

struct DumpStats {
  std::size_t pages_seen = 0;
  std::size_t pages_in_article_namespace = 0;
  std::size_t pages_skipped = 0;
  std::size_t bytes_read = 0;
};

enum class Compression { none, bz2, automatic };

struct DumpOptions {
  Compression compression = Compression::automatic;
  /// Log and drop malformed pages instead of aborting.
  bool skip_bad_pages = false;
  std::size_t chunk_size = 1 << 16;
};

/// Malformed XML or a structurally invalid page.
class DumpParseError : public InputError {
 public:
  DumpParseError(const std::string& what, std::uint64_t byte_offset, std::string element_path);

  std::uint64_t byte_offset() const { return byte_offset_; }
  const std::string& element_path() const { return element_path_; }

 private:
  std::uint64_t byte_offset_;
  std::string element_path_;
};

/// Magic bytes first ("BZh"), then the file extension.
Compression detect_compression(const std::filesystem::path& path);

/// Pull-based reader over a MediaWiki XML export. Memory use is bounded by
/// the largest page plus one read chunk.
class PageStream {
 public:
  PageStream(const std::filesystem::path& path, DumpOptions options = {});
  /// Reads an already-opened (decompressed) XML stream.
  explicit PageStream(std::unique_ptr<std::istream> xml, DumpOptions options = {});
  ~PageStream();
  PageStream(PageStream&&) noexcept;
  PageStream& operator=(PageStream&&) noexcept;

  std::optional<WikiPage> next();
  const DumpStats& stats() const;
  /// Diagnostics collected in skip-bad-pages mode.
  const std::vector<std::string>& warnings() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

PageStream open_dump(const std::filesystem::path& path, Compression compression = Compression::automatic,
                     bool skip_bad_pages = false);

/// Recognises redirect directives ("#REDIRECT [[X]]" and its localised
/// variants) at the start of a page body, case-insensitively.
class RedirectMatcher {
 public:
  RedirectMatcher();
  explicit RedirectMatcher(std::vector<std::string> keywords);

  /// Loads {"<lang>": ["#KEYWORD", ...], ...} and merges every language.
  static RedirectMatcher load(const std::filesystem::path& path);

  bool is_redirect(std::string_view wikitext) const;
  const std::vector<std::string>& keywords() const { return keywords_; }

 private:
  std::vector<std::string> keywords_;  // lowercased
};

bool is_article(const WikiPage& page, const RedirectMatcher& redirects);

/// Passes namespace-0, non-redirect pages from an upstream PageStream.
class ArticleFilter {
 public:
  ArticleFilter(PageStream& upstream, RedirectMatcher redirects);
  std::optional<WikiPage> next();
  std::size_t dropped() const { return dropped_; }

 private:
  PageStream* upstream_;
  RedirectMatcher redirects_;
  std::size_t dropped_ = 0;
};

}  // namespace wikicite::dump
