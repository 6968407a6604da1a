#pragma once

#include <array>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wikicite/classify.hpp"
#include "wikicite/errors.hpp"
#include "wikicite/harmonize.hpp"

namespace wikicite::output {

inline constexpr std::string_view kSchemaVersion = "1.0";

inline constexpr std::array<std::string_view, 10> kColumns = {
    "type_of_citation", "page_title", "title", "url", "tld",
    "authors", "id_list", "citation", "actual_label", "acquired_id_list",
};

enum class Format { csv, jsonl };

std::string_view format_name(Format f);
std::string_view format_extension(Format f);
Format parse_format(std::string_view name);  // throws ConfigError

using IdPairs = std::vector<std::pair<std::string, std::string>>;

/// One row of the released dataset. Optional text fields never hold an
/// empty string; an empty cell reads back as absent.
struct DatasetRow {
  std::string type_of_citation;
  std::string page_title;
  std::optional<std::string> title;
  std::optional<std::string> url;
  std::optional<std::string> tld;
  std::vector<std::string> authors;
  IdPairs id_list;  // (scheme name, value)
  std::string citation;
  std::optional<classify::Label> actual_label;  // absent before classification
  IdPairs acquired_id_list;
  /// Template properties beyond the 10 columns, and unknown input keys.
  std::vector<std::pair<std::string, std::string>> extra;

  bool operator==(const DatasetRow&) const = default;
};

DatasetRow to_row(const harmonize::Citation& c);

/// Identifiers of a row, parsed back into schemes. Unknown scheme names are skipped.
std::vector<Identifier> identifiers_of(const IdPairs& ids);

class SchemaError : public InputError {
 public:
  SchemaError(const std::string& column, const std::string& what)
      : InputError(what), column_(column) {}
  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

// CSV primitives (RFC 4180).
std::string csv_escape(std::string_view field);
std::string csv_record(const std::vector<std::string>& fields);
/// Reads one record; returns false at end of input. Throws InputError on an
/// unterminated quoted field.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields);

std::vector<std::string> row_to_csv_fields(const DatasetRow& row);
std::string row_to_jsonl(const DatasetRow& row, bool extended);

struct WriterOptions {
  Format format = Format::csv;
  std::size_t max_rows_per_file = 1'000'000;  // 0 means unlimited
  bool extended = false;                       // JSONL only: add an "extra" object
};

/// Writes part-00000.<ext>, part-00001.<ext>, ... into a directory. Parts are
/// written to a temporary name and renamed when complete. If finish() is not
/// reached, every part written by this writer is removed.
class DatasetWriter {
 public:
  DatasetWriter(std::filesystem::path dir, WriterOptions options);
  ~DatasetWriter();
  DatasetWriter(const DatasetWriter&) = delete;
  DatasetWriter& operator=(const DatasetWriter&) = delete;

  void write(const DatasetRow& row);
  /// Returns the part files in order.
  std::vector<std::filesystem::path> finish();
  std::size_t rows_written() const { return rows_; }

 private:
  void open_part();
  void close_part();
  void cleanup() noexcept;

  std::filesystem::path dir_;
  WriterOptions options_;
  std::unique_ptr<std::ofstream> out_;
  std::filesystem::path tmp_path_;
  std::vector<std::filesystem::path> parts_;
  std::size_t rows_ = 0;
  std::size_t rows_in_part_ = 0;
  bool finished_ = false;
};

std::vector<std::filesystem::path> write_rows(const std::vector<DatasetRow>& rows, const std::filesystem::path& dir,
                                              const WriterOptions& options);

/// Files making up a dataset: a single file, or the sorted part files of a directory.
std::vector<std::filesystem::path> dataset_files(const std::filesystem::path& path,
                                                 std::optional<Format> format = std::nullopt);
Format detect_format(const std::filesystem::path& path);

/// Streaming reader over a file or a part directory.
class RowReader {
 public:
  explicit RowReader(const std::filesystem::path& path, std::optional<Format> format = std::nullopt);
  ~RowReader();
  RowReader(const RowReader&) = delete;
  RowReader& operator=(const RowReader&) = delete;

  std::optional<DatasetRow> next();
  Format format() const { return format_; }

 private:
  bool open_next_file();

  Format format_;
  std::vector<std::filesystem::path> files_;
  std::size_t file_index_ = 0;
  std::unique_ptr<std::ifstream> in_;
  std::vector<std::string> header_;
  std::size_t record_ = 0;
};

std::vector<DatasetRow> read_rows(const std::filesystem::path& path, std::optional<Format> format = std::nullopt);

}  // namespace wikicite::output
