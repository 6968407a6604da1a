#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace wikicite {

/// Whole file as bytes. Throws InputError when unreadable.
std::string read_file(const std::filesystem::path& path);

/// Writes to "<path>.tmp" and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace wikicite
