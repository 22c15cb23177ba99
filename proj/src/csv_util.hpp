#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace seedstab::detail {

// Splits one CSV record. Supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

// Quotes a field when it contains a comma, quote or newline.
std::string csv_field(std::string_view value);

// Breaks text into lines, dropping a trailing '\r' and a final empty line.
std::vector<std::string_view> split_lines(std::string_view text);

// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

std::string format_fixed(double value, int decimals);

double parse_double(std::string_view text);
long long parse_int(std::string_view text);

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary and renames, so readers never see a
// half-written file.
void write_file(const std::filesystem::path& path, std::string_view content);

} // namespace seedstab::detail
