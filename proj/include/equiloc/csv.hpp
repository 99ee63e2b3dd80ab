#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace equiloc::csv {

// Splits one CSV record. Double-quoted fields may contain commas and "" as
// an escaped quote; surrounding whitespace on unquoted fields is trimmed.
std::vector<std::string> split_record(std::string_view line);

std::string trim(std::string_view s);

// Strict numeric parsing: the whole field must be consumed.
bool parse_double(std::string_view field, double& out);
bool parse_int(std::string_view field, long long& out);

// Shortest text that round-trips a double exactly ("%.17g").
std::string format_double(double v);

// Quotes a field only when it contains a comma, quote or newline.
std::string quote(std::string_view field);

std::vector<std::string> read_lines(const std::string& path);

}  // namespace equiloc::csv
