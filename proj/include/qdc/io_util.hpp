#pragma once

#include <filesystem>
#include <ios>
#include <string>

namespace qdc {

/// Stores a file via temp-and-rename so failed runs never leave partial
/// output behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& payload,
                       std::ios::openmode mode = std::ios::out);

/// Reads a whole file; throws ValidationError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace qdc
