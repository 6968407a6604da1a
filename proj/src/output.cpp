#include "wikicite/output.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "json.hpp"

namespace wikicite::output {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string_view format_name(Format f) { return f == Format::csv ? "csv" : "jsonl"; }
std::string_view format_extension(Format f) { return f == Format::csv ? ".csv" : ".jsonl"; }

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "jsonl") return Format::jsonl;
  throw ConfigError("unknown output format '" + std::string(name) + "' (expected csv or jsonl)");
}

DatasetRow to_row(const harmonize::Citation& c) {
  DatasetRow row;
  row.type_of_citation = c.type_of_citation;
  row.page_title = c.page_title;
  auto non_empty = [](const std::optional<std::string>& v) -> std::optional<std::string> {
    if (v && !v->empty()) return v;
    return std::nullopt;
  };
  row.title = non_empty(c.title);
  row.url = non_empty(c.url);
  row.tld = non_empty(c.tld);
  row.authors = c.authors;
  for (const auto& id : c.id_list) row.id_list.emplace_back(std::string(scheme_name(id.scheme)), id.value);
  row.citation = c.citation_text;
  row.extra = c.extra;
  return row;
}

std::vector<Identifier> identifiers_of(const IdPairs& ids) {
  std::vector<Identifier> out;
  for (const auto& [scheme, value] : ids) {
    if (auto s = parse_scheme(scheme)) out.push_back(Identifier{*s, value, true});
  }
  return out;
}

// CSV

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_record(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += csv_escape(fields[i]);
  }
  out += "\r\n";
  return out;
}

bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  int c = in.get();
  if (c == std::char_traits<char>::eof()) return false;
  std::string field;
  bool quoted = false;
  bool after_quote = false;
  while (true) {
    if (c == std::char_traits<char>::eof()) {
      if (quoted) throw InputError("unterminated quoted CSV field");
      fields.push_back(std::move(field));
      return true;
    }
    char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      after_quote = false;
    } else if (ch == '\r' || ch == '\n') {
      if (ch == '\r' && in.peek() == '\n') in.get();
      fields.push_back(std::move(field));
      return true;
    } else if (ch == '"' && field.empty() && !after_quote) {
      quoted = true;
    } else {
      field.push_back(ch);
    }
    c = in.get();
  }
}

namespace {

ojson ids_json(const IdPairs& ids) {
  ojson arr = ojson::array();
  for (const auto& [s, v] : ids) arr.push_back(ojson::array({s, v}));
  return arr;
}

ojson opt_json(const std::optional<std::string>& v) {
  if (!v) return nullptr;
  return *v;
}

std::string dump(const ojson& j) { return j.dump(-1, ' ', false); }

std::optional<std::string> opt_cell(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  return cell;
}

IdPairs parse_ids(const nlohmann::json& j, const std::string& column) {
  if (!j.is_array()) throw SchemaError(column, "column '" + column + "' must be a JSON array of pairs");
  IdPairs out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string()) {
      throw SchemaError(column, "column '" + column + "' must contain [scheme, value] string pairs");
    }
    out.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
  }
  return out;
}

std::vector<std::string> parse_strings(const nlohmann::json& j, const std::string& column) {
  if (!j.is_array()) throw SchemaError(column, "column '" + column + "' must be a JSON array of strings");
  std::vector<std::string> out;
  for (const auto& s : j) {
    if (!s.is_string()) throw SchemaError(column, "column '" + column + "' must be a JSON array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

nlohmann::json parse_cell_json(const std::string& cell, const std::string& column) {
  try {
    return nlohmann::json::parse(cell);
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(column, "column '" + column + "' does not hold valid JSON");
  }
}

std::optional<classify::Label> parse_label_cell(const std::string& cell, const std::string& column) {
  if (cell.empty()) return std::nullopt;
  auto l = classify::parse_label(cell);
  if (!l) throw SchemaError(column, "column '" + column + "' has unknown label '" + cell + "'");
  return l;
}

std::string value_text(const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

std::vector<std::string> row_to_csv_fields(const DatasetRow& row) {
  return {row.type_of_citation,
          row.page_title,
          row.title.value_or(""),
          row.url.value_or(""),
          row.tld.value_or(""),
          dump(ojson(row.authors)),
          dump(ids_json(row.id_list)),
          row.citation,
          row.actual_label ? std::string(classify::label_name(*row.actual_label)) : std::string(),
          dump(ids_json(row.acquired_id_list))};
}

std::string row_to_jsonl(const DatasetRow& row, bool extended) {
  ojson j;
  j["type_of_citation"] = row.type_of_citation;
  j["page_title"] = row.page_title;
  j["title"] = opt_json(row.title);
  j["url"] = opt_json(row.url);
  j["tld"] = opt_json(row.tld);
  j["authors"] = row.authors;
  j["id_list"] = ids_json(row.id_list);
  j["citation"] = row.citation;
  j["actual_label"] = row.actual_label ? ojson(std::string(classify::label_name(*row.actual_label))) : ojson(nullptr);
  j["acquired_id_list"] = ids_json(row.acquired_id_list);
  if (extended) {
    ojson extra = ojson::object();
    for (const auto& [k, v] : row.extra) {
      if (!extra.contains(k)) extra[k] = v;
    }
    j["extra"] = std::move(extra);
  }
  try {
    return dump(j);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("row for page '") + row.page_title + "' is not valid UTF-8: " + e.what());
  }
}

// Writer

DatasetWriter::DatasetWriter(fs::path dir, WriterOptions options) : dir_(std::move(dir)), options_(options) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw InputError("cannot create output directory " + dir_.string() + ": " + ec.message());
}

DatasetWriter::~DatasetWriter() {
  if (!finished_) cleanup();
}

void DatasetWriter::open_part() {
  char name[32];
  std::snprintf(name, sizeof name, "part-%05zu", parts_.size());
  fs::path final_path = dir_ / (std::string(name) + std::string(format_extension(options_.format)));
  tmp_path_ = final_path;
  tmp_path_ += ".tmp";
  out_ = std::make_unique<std::ofstream>(tmp_path_, std::ios::binary | std::ios::trunc);
  if (!*out_) throw InputError("cannot write " + tmp_path_.string());
  parts_.push_back(final_path);
  rows_in_part_ = 0;
  if (options_.format == Format::csv) {
    *out_ << csv_record(std::vector<std::string>(kColumns.begin(), kColumns.end()));
  }
}

void DatasetWriter::close_part() {
  if (!out_) return;
  out_->flush();
  bool ok = static_cast<bool>(*out_);
  out_.reset();
  if (!ok) throw InputError("write failed for " + tmp_path_.string());
  std::error_code ec;
  fs::rename(tmp_path_, parts_.back(), ec);
  if (ec) throw InputError("cannot rename " + tmp_path_.string() + ": " + ec.message());
}

void DatasetWriter::write(const DatasetRow& row) {
  if (finished_) throw std::logic_error("DatasetWriter already finished");
  if (!out_) open_part();
  if (options_.max_rows_per_file != 0 && rows_in_part_ == options_.max_rows_per_file) {
    close_part();
    open_part();
  }
  if (options_.format == Format::csv) *out_ << csv_record(row_to_csv_fields(row));
  else *out_ << row_to_jsonl(row, options_.extended) << '\n';
  if (!*out_) throw InputError("write failed for " + tmp_path_.string());
  ++rows_;
  ++rows_in_part_;
}

std::vector<fs::path> DatasetWriter::finish() {
  if (finished_) return parts_;
  if (!out_) open_part();
  close_part();
  // Stale parts of an earlier, larger run.
  const std::string ext(format_extension(options_.format));
  std::set<fs::path> keep(parts_.begin(), parts_.end());
  for (const auto& entry : fs::directory_iterator(dir_)) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("part-") && entry.path().extension() == ext && keep.count(entry.path()) == 0) {
      fs::remove(entry.path());
    }
  }
  finished_ = true;
  return parts_;
}

void DatasetWriter::cleanup() noexcept {
  out_.reset();
  std::error_code ec;
  if (!tmp_path_.empty()) fs::remove(tmp_path_, ec);
  for (const auto& p : parts_) fs::remove(p, ec);
}

std::vector<fs::path> write_rows(const std::vector<DatasetRow>& rows, const fs::path& dir,
                                 const WriterOptions& options) {
  DatasetWriter w(dir, options);
  for (const auto& r : rows) w.write(r);
  return w.finish();
}

// Reader

Format detect_format(const fs::path& path) {
  if (fs::is_directory(path)) {
    bool csv = false;
    bool jsonl = false;
    for (const auto& entry : fs::directory_iterator(path)) {
      const auto name = entry.path().filename().string();
      if (!name.starts_with("part-")) continue;
      if (entry.path().extension() == ".csv") csv = true;
      if (entry.path().extension() == ".jsonl") jsonl = true;
    }
    if (csv && jsonl) throw InputError("directory " + path.string() + " holds both csv and jsonl parts");
    if (csv) return Format::csv;
    if (jsonl) return Format::jsonl;
    throw InputError("no dataset part files in " + path.string());
  }
  if (path.extension() == ".csv") return Format::csv;
  if (path.extension() == ".jsonl" || path.extension() == ".json") return Format::jsonl;
  throw InputError("cannot tell the dataset format of " + path.string());
}

std::vector<fs::path> dataset_files(const fs::path& path, std::optional<Format> format) {
  if (!fs::exists(path)) throw InputError("dataset not found: " + path.string());
  if (!fs::is_directory(path)) return {path};
  Format f = format ? *format : detect_format(path);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("part-") && entry.path().extension() == format_extension(f)) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

RowReader::RowReader(const fs::path& path, std::optional<Format> format)
    : format_(format ? *format : detect_format(path)), files_(dataset_files(path, format_)) {}

RowReader::~RowReader() = default;

bool RowReader::open_next_file() {
  in_.reset();
  header_.clear();
  record_ = 0;
  if (file_index_ >= files_.size()) return false;
  const fs::path& p = files_[file_index_++];
  in_ = std::make_unique<std::ifstream>(p, std::ios::binary);
  if (!*in_) throw InputError("cannot read " + p.string());
  if (format_ == Format::csv) {
    if (in_->peek() == 0xEF) {  // UTF-8 byte order mark
      char bom[3];
      in_->read(bom, 3);
    }
    if (!read_csv_record(*in_, header_)) {
      throw SchemaError("type_of_citation", "missing header row in " + p.string());
    }
    for (auto col : kColumns) {
      if (std::find(header_.begin(), header_.end(), col) == header_.end()) {
        throw SchemaError(std::string(col), "missing required column '" + std::string(col) + "' in " + p.string());
      }
    }
  }
  return true;
}

std::optional<DatasetRow> RowReader::next() {
  while (true) {
    if (!in_ && !open_next_file()) return std::nullopt;
    if (format_ == Format::csv) {
      std::vector<std::string> fields;
      if (!read_csv_record(*in_, fields)) {
        in_.reset();
        continue;
      }
      ++record_;
      if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
      if (fields.size() != header_.size()) {
        throw InputError("record " + std::to_string(record_) + " of " + files_[file_index_ - 1].string() + " has " +
                         std::to_string(fields.size()) + " fields, header has " + std::to_string(header_.size()));
      }
      DatasetRow row;
      for (std::size_t i = 0; i < header_.size(); ++i) {
        const std::string& col = header_[i];
        std::string& cell = fields[i];
        if (col == "type_of_citation") row.type_of_citation = std::move(cell);
        else if (col == "page_title") row.page_title = std::move(cell);
        else if (col == "title") row.title = opt_cell(cell);
        else if (col == "url") row.url = opt_cell(cell);
        else if (col == "tld") row.tld = opt_cell(cell);
        else if (col == "authors") row.authors = parse_strings(parse_cell_json(cell, col), col);
        else if (col == "id_list") row.id_list = parse_ids(parse_cell_json(cell, col), col);
        else if (col == "citation") row.citation = std::move(cell);
        else if (col == "actual_label") row.actual_label = parse_label_cell(cell, col);
        else if (col == "acquired_id_list") row.acquired_id_list = parse_ids(parse_cell_json(cell, col), col);
        else row.extra.emplace_back(col, std::move(cell));
      }
      return row;
    }
    std::string line;
    if (!std::getline(*in_, line)) {
      in_.reset();
      continue;
    }
    ++record_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InputError("line " + std::to_string(record_) + " of " + files_[file_index_ - 1].string() +
                       " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw InputError("line " + std::to_string(record_) + " is not a JSON object");
    for (auto col : kColumns) {
      if (!j.contains(col)) {
        throw SchemaError(std::string(col), "missing required column '" + std::string(col) + "' on line " +
                                                std::to_string(record_) + " of " + files_[file_index_ - 1].string());
      }
    }
    auto text = [&](const char* col, bool nullable) -> std::optional<std::string> {
      const auto& v = j[col];
      if (v.is_null() && nullable) return std::nullopt;
      if (!v.is_string()) throw SchemaError(col, std::string("column '") + col + "' must be a string");
      std::string s = v.get<std::string>();
      if (nullable && s.empty()) return std::nullopt;
      return s;
    };
    DatasetRow row;
    row.type_of_citation = *text("type_of_citation", false);
    row.page_title = *text("page_title", false);
    row.title = text("title", true);
    row.url = text("url", true);
    row.tld = text("tld", true);
    row.authors = parse_strings(j["authors"], "authors");
    row.id_list = parse_ids(j["id_list"], "id_list");
    row.citation = *text("citation", false);
    row.actual_label = parse_label_cell(text("actual_label", true).value_or(""), "actual_label");
    row.acquired_id_list = parse_ids(j["acquired_id_list"], "acquired_id_list");
    for (const auto& [k, v] : j.items()) {
      if (std::find(kColumns.begin(), kColumns.end(), k) != kColumns.end()) continue;
      if (k == "extra" && v.is_object()) {
        for (const auto& [ek, ev] : v.items()) row.extra.emplace_back(ek, value_text(ev));
      } else {
        row.extra.emplace_back(k, value_text(v));
      }
    }
    return row;
  }
}

std::vector<DatasetRow> read_rows(const fs::path& path, std::optional<Format> format) {
  RowReader reader(path, format);
  std::vector<DatasetRow> rows;
  while (auto r = reader.next()) rows.push_back(std::move(*r));
  return rows;
}

}  // namespace wikicite::output
