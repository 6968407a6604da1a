#include "wikicite/manifest.hpp"

#include <chrono>
#include <ctime>

#include "wikicite/digest.hpp"
#include "wikicite/files.hpp"
#include "wikicite/output.hpp"

namespace wikicite {

std::string utc_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest::RunManifest(std::string command, std::vector<std::string> command_line)
    : command_(std::move(command)), command_line_(std::move(command_line)), started_at_(utc_timestamp()) {}

void RunManifest::add_input(const std::string& role, const std::filesystem::path& path) {
  nlohmann::ordered_json entry = {{"path", path.string()}, {"sha256", sha256_file(path)}};
  if (inputs_.contains(role)) {
    if (!inputs_[role].is_array()) inputs_[role] = nlohmann::ordered_json::array({inputs_[role]});
    inputs_[role].push_back(std::move(entry));
  } else {
    inputs_[role] = std::move(entry);
  }
}

void RunManifest::set_counts(const std::string& stage, nlohmann::ordered_json counts) {
  counts_[stage] = std::move(counts);
}

void RunManifest::set(const std::string& key, nlohmann::ordered_json value) { extra_[key] = std::move(value); }

void RunManifest::add_outputs(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) {
    outputs_.push_back({{"file", f.filename().string()}, {"sha256", sha256_file(f)}});
  }
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = "wikicite";
  j["schema_version"] = std::string(output::kSchemaVersion);
  j["command"] = command_;
  j["command_line"] = command_line_;
  j["config"] = config_;
  j["config_digest"] = sha256_hex(config_.dump());
  j["inputs"] = inputs_;
  for (const auto& [k, v] : extra_.items()) j[k] = v;
  j["counts"] = counts_;
  j["outputs"] = outputs_;
  j["started_at"] = started_at_;
  j["finished_at"] = finished_at_.empty() ? utc_timestamp() : finished_at_;
  return j;
}

std::filesystem::path RunManifest::write(const std::filesystem::path& dir) {
  finished_at_ = utc_timestamp();
  std::filesystem::create_directories(dir);
  auto path = dir / "manifest.json";
  write_file_atomic(path, to_json().dump(2) + "\n");
  return path;
}

}  // namespace wikicite
