#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace sieval {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
// Writes bytes verbatim (no newline translation). Parent directories must exist.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace sieval
