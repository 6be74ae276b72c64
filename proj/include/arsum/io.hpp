#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace arsum {

/// Throws IoError.
std::string read_file(const std::filesystem::path& path);

/// Writes atomically via a sibling temp file; creates parent directories.
void write_file(const std::filesystem::path& path, std::string_view content);

/// ISO-8601 UTC. Honors SOURCE_DATE_EPOCH so reproducible runs can pin it.
std::string utc_timestamp();

/// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string_view> split_lines(std::string_view content);

}  // namespace arsum
