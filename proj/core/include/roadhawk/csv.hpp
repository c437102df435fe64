#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace roadhawk::csv {

// Shortest round-trip decimal form, locale independent.
std::string format_double(double v);

// Splits one line on commas; no quoting (none of our formats need it).
std::vector<std::string> split(const std::string& line);

double parse_double(const std::string& field, long line_no);

// Writes via a temp file in the same directory, then renames.
void write_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace roadhawk::csv
