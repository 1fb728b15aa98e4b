#ifndef TEXTILE_IO_HPP
#define TEXTILE_IO_HPP

#include <filesystem>
#include <string>
#include <string_view>

namespace textile {

// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

// Lowercase hex SHA-256 of a byte string / file.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace textile

#endif  // TEXTILE_IO_HPP
