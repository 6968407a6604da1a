#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "wikicite/domain.hpp"

namespace wikicite::testing {

inline std::filesystem::path fixtures_dir() { return WIKICITE_FIXTURES_DIR; }
inline std::filesystem::path data_dir() { return WIKICITE_TEST_DATA_DIR; }

inline std::shared_ptr<const domain::PublicSuffixList> shared_psl() {
  static auto psl = std::make_shared<const domain::PublicSuffixList>(
      domain::PublicSuffixList::load(data_dir() / "public_suffix_list.dat"));
  return psl;
}
inline const domain::PublicSuffixList& psl() { return *shared_psl(); }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("wikicite-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace wikicite::testing
