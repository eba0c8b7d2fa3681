#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace embedshape {

// Hex-encoded SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it into place, so readers
// never observe a partially written artifact.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// RFC 4180 field quoting and line splitting.
std::string csv_escape(std::string_view field);
std::vector<std::string> csv_split_line(std::string_view line);

}  // namespace embedshape
