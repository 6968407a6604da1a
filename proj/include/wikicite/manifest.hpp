#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace wikicite {

/// "2026-01-31T12:00:00Z"
std::string utc_timestamp();

/// manifest.json written beside every stage output.
class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> command_line);

  /// Records path and SHA-256 of an input file under inputs.<role>.
  void add_input(const std::string& role, const std::filesystem::path& path);
  /// Effective configuration; its digest is computed when the manifest is written.
  void set_config(nlohmann::ordered_json config) { config_ = std::move(config); }
  void set_counts(const std::string& stage, nlohmann::ordered_json counts);
  void set(const std::string& key, nlohmann::ordered_json value);
  void add_outputs(const std::vector<std::filesystem::path>& files);

  nlohmann::ordered_json to_json() const;
  /// Writes <dir>/manifest.json atomically.
  std::filesystem::path write(const std::filesystem::path& dir);

 private:
  std::string command_;
  std::vector<std::string> command_line_;
  std::string started_at_;
  std::string finished_at_;
  nlohmann::ordered_json config_ = nlohmann::ordered_json::object();
  nlohmann::ordered_json inputs_ = nlohmann::ordered_json::object();
  nlohmann::ordered_json counts_ = nlohmann::ordered_json::object();
  nlohmann::ordered_json outputs_ = nlohmann::ordered_json::array();
  nlohmann::ordered_json extra_ = nlohmann::ordered_json::object();
};

}  // namespace wikicite
