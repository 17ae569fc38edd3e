#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace bpire {

/// Writes `content` to a temporary sibling file and renames it over `file`.
/// Errors carry the path.
void write_file_atomic(const std::filesystem::path& file, std::string_view content);

std::string read_file(const std::filesystem::path& file);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace bpire
